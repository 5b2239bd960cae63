#include "ddfl/controller.hpp"

#include <cmath>

namespace ddfl {

Eigen::Matrix2d lyapunov_solve(const Eigen::RowVector2d& K,
                               const Eigen::Matrix2d& Q) {
  const double k1 = K(0), k2 = K(1);
  if (!(k1 < 0) || !(k2 < 0))
    throw SynthesisError("lyapunov_solve: companion form needs k1 < 0, k2 < 0");

  // With M = [[0, 1], [k1, k2]], expanding M^T P + P M = -Q entrywise gives
  // three equations in (p11, p12, p22); they decouple from the top left.
  const double q11 = Q(0, 0), q12 = Q(0, 1), q22 = Q(1, 1);
  const double p12 = -q11 / (2 * k1);
  const double p22 = -(q22 / 2 + p12) / k2;
  const double p11 = -q12 - k2 * p12 - k1 * p22;

  Eigen::Matrix2d P;
  P << p11, p12, p12, p22;
  return P;
}

ControllerGains design_gains(double pole1, double pole2,
                             const Eigen::Matrix2d& Q) {
  if (!std::isfinite(pole1) || !std::isfinite(pole2) || !(pole1 < 0) ||
      !(pole2 < 0))
    throw ConfigError("design_gains: poles must be finite and negative");
  const double sym_tol = 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff());
  if (std::abs(Q(0, 1) - Q(1, 0)) > sym_tol)
    throw ConfigError("design_gains: Q must be symmetric");
  if (!(Q(0, 0) > 0) || !(Q.determinant() > 0))
    throw ConfigError("design_gains: Q must be positive definite");

  ControllerGains gains;
  gains.K = Eigen::RowVector2d(-pole1 * pole2, pole1 + pole2);
  gains.Q = Q;
  gains.P = lyapunov_solve(gains.K, Q);

  // Certificates the construction is supposed to guarantee; if they do not
  // hold something upstream is numerically broken.
  if (!(gains.P(0, 0) > 0) || !(gains.P.determinant() > 0))
    throw SynthesisError("design_gains: certificate P is not positive definite");
  if (lyapunov_residual(gains) >
      1e-8 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw SynthesisError("design_gains: Lyapunov residual too large");
  return gains;
}

std::array<std::complex<double>, 2> closed_loop_poles(
    const Eigen::RowVector2d& K) {
  // Characteristic polynomial of [[0, 1], [k1, k2]]: s^2 - k2 s - k1.
  const double b = -K(1), c = -K(0);
  const double disc = b * b - 4 * c;
  if (disc >= 0) {
    const double root = std::sqrt(disc);
    // Stable formula: compute the larger-magnitude root first.
    const double s1 = (-b - (b >= 0 ? root : -root)) / 2;
    const double s2 = s1 != 0 ? c / s1 : -b - s1;
    return {std::complex<double>(s1, 0), std::complex<double>(s2, 0)};
  }
  const double re = -b / 2, im = std::sqrt(-disc) / 2;
  return {std::complex<double>(re, im), std::complex<double>(re, -im)};
}

double lyapunov_residual(const ControllerGains& gains) {
  const Eigen::Matrix2d M = chain_a1() + chain_b1() * gains.K;
  return (M.transpose() * gains.P + gains.P * M + gains.Q).norm();
}

double min_eigenvalue_sym2(const Eigen::Matrix2d& S) {
  const double a = S(0, 0), b = S(0, 1), d = S(1, 1);
  const double mean = (a + d) / 2;
  const double radius = std::sqrt((a - d) * (a - d) / 4 + b * b);
  return mean - radius;
}

double control_law(const ControllerGains& gains, const ParamEstimate& pi,
                   const StateEstimate& zhat, double min_abs_beta) {
  if (std::abs(pi.beta_hat) < min_abs_beta)
    throw ControllerFaultError(
        "control_law: |beta_hat| = " + std::to_string(std::abs(pi.beta_hat)) +
        " below floor " + std::to_string(min_abs_beta));
  return (gains.K.dot(zhat.head()) - pi.alpha_hat) / pi.beta_hat;
}

}  // namespace ddfl
