#ifndef DDFL_CONTROLLER_HPP
#define DDFL_CONTROLLER_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "ddfl/errors.hpp"
#include "ddfl/param_observer.hpp"
#include "ddfl/state_estimator.hpp"

namespace ddfl {

// Double-integrator pair underlying the hold model. One period of the
// Taylor step, seen as a discrete linear system in (z, accel), is
//   z+ = (I + A1 T) z + (B1 T + B2 T^2) accel = A(T) z + B(T) accel.
inline Eigen::Matrix2d chain_a1() {
  Eigen::Matrix2d m;
  m << 0, 1, 0, 0;
  return m;
}
inline Eigen::Vector2d chain_b1() { return Eigen::Vector2d(0, 1); }
inline Eigen::Vector2d chain_b2() { return Eigen::Vector2d(0.5, 0); }
inline Eigen::Matrix2d hold_a(double T) {
  return Eigen::Matrix2d::Identity() + chain_a1() * T;
}
inline Eigen::Vector2d hold_b(double T) {
  return chain_b1() * T + chain_b2() * T * T;
}

struct ControllerGains {
  Eigen::RowVector2d K;  // state feedback: commanded accel = K z
  Eigen::Matrix2d P;     // Lyapunov certificate for A1 + B1 K
  Eigen::Matrix2d Q;     // decrease rate it certifies
};

// Closed-form solution of (A1 + B1 K)^T P + P (A1 + B1 K) = -Q for the
// companion closed loop [[0, 1], [k1, k2]]. Requires k1 < 0, k2 < 0
// (Hurwitz) and symmetric positive-definite Q; throws SynthesisError
// otherwise.
Eigen::Matrix2d lyapunov_solve(const Eigen::RowVector2d& K,
                               const Eigen::Matrix2d& Q);

// Pole placement on the double-integrator pair: for desired real poles
// p1, p2 < 0 the gain is K = [-p1 p2, p1 + p2]; P certifies it against Q.
// Throws ConfigError for non-negative / non-finite poles or a Q that is not
// symmetric positive definite.
ControllerGains design_gains(double pole1, double pole2,
                             const Eigen::Matrix2d& Q =
                                 Eigen::Matrix2d::Identity());

// Eigenvalues of [[0, 1], [k1, k2]] via the characteristic quadratic
// s^2 - k2 s - k1 (exact to rounding, no iterative eigensolver).
std::array<std::complex<double>, 2> closed_loop_poles(
    const Eigen::RowVector2d& K);

// Frobenius norm of (A1 + B1 K)^T P + P (A1 + B1 K) + Q.
double lyapunov_residual(const ControllerGains& gains);

// Smaller eigenvalue of a symmetric 2x2, in closed form.
double min_eigenvalue_sym2(const Eigen::Matrix2d& S);

// Certainty-equivalence input: u = (K zhat - alpha_hat) / beta_hat.
// Throws ControllerFaultError when |beta_hat| < min_abs_beta; the observer
// floor/projection invariants are supposed to keep this unreachable.
double control_law(const ControllerGains& gains, const ParamEstimate& pi,
                   const StateEstimate& zhat, double min_abs_beta = 1e-3);

}  // namespace ddfl

#endif  // DDFL_CONTROLLER_HPP
