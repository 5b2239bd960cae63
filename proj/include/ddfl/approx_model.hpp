#ifndef DDFL_APPROX_MODEL_HPP
#define DDFL_APPROX_MODEL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ddfl/errors.hpp"
#include "ddfl/plant.hpp"

namespace ddfl {

// One hold period of the second-order Taylor model with the acceleration
// frozen at its value at the step start:
//   z1+ = z1 + z2 T + (alpha + beta u) T^2 / 2
//   z2+ = z2 + (alpha + beta u) T
// Against the true flow this is accurate to O(T^3) in z1 and O(T^2) in z2,
// and exact when alpha and beta are constants (pure double integrator).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> taylor_step(Scalar T,
                                        const Eigen::Matrix<Scalar, 2, 1>& z,
                                        Scalar alpha, Scalar beta, Scalar u) {
  const Scalar accel = alpha + beta * u;
  return Eigen::Matrix<Scalar, 2, 1>(
      z(0) + z(1) * T + accel * T * T / Scalar(2), z(1) + accel * T);
}

struct ApproxModel {
  double T = 0.01;

  Eigen::Vector2d step(const Eigen::Vector2d& z, double alpha, double beta,
                       double u) const {
    return taylor_step(T, z, alpha, beta, u);
  }
};

// Componentwise |true flow - model step| over one hold period, with the
// drift and gain frozen at the supplied values (normally alpha(z), beta(z)).
Eigen::Vector2d one_step_error(const ExactFlowOracle& oracle,
                               const ApproxModel& model,
                               const Eigen::Vector2d& z, double u,
                               double alpha0, double beta0);

// Least-squares slope of log(err) against log(T). Throws FitError when
// fewer than two distinct positive T values survive, or any error is
// non-positive / non-finite (no usable point on the log-log plane).
double fit_order(const std::vector<std::pair<double, double>>& t_and_err);

struct OrderSweepRow {
  double T;
  double err_z1;
  double err_z2;
};

// Slope fit over a sweep, for one state component (0 or 1).
double fit_order(const std::vector<OrderSweepRow>& rows, int component);

// Evaluation grid for worst-case one-step errors.
struct GridBox {
  Eigen::Vector2d z_lo{-1.0, -1.0};
  Eigen::Vector2d z_hi{1.0, 1.0};
  double u_lo = -2.0;
  double u_hi = 2.0;
  int points_per_axis = 5;
};

// Max-norm one-step error over the (z, u) grid, one row per T value.
std::vector<OrderSweepRow> order_sweep(const ExactFlowOracle& oracle,
                                       const std::vector<double>& T_values,
                                       const GridBox& box = {});

}  // namespace ddfl

#endif  // DDFL_APPROX_MODEL_HPP
