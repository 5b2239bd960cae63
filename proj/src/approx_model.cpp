#include "ddfl/approx_model.hpp"

#include <cmath>

namespace ddfl {

Eigen::Vector2d one_step_error(const ExactFlowOracle& oracle,
                               const ApproxModel& model,
                               const Eigen::Vector2d& z, double u,
                               double alpha0, double beta0) {
  const Eigen::Vector2d truth = exact_flow(oracle, z, u, model.T);
  const Eigen::Vector2d approx = model.step(z, alpha0, beta0, u);
  return (truth - approx).cwiseAbs();
}

double fit_order(const std::vector<std::pair<double, double>>& t_and_err) {
  // Least squares on (log T, log err); classic slope formula.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  double first_T = 0;
  bool all_same_T = true;
  for (const auto& [T, err] : t_and_err) {
    if (!(T > 0) || !std::isfinite(T))
      throw FitError("fit_order: hold periods must be positive");
    if (!(err > 0) || !std::isfinite(err))
      throw FitError("fit_order: errors must be positive to fit on a log scale");
    if (n == 0)
      first_T = T;
    else if (T != first_T)
      all_same_T = false;
    const double x = std::log(T), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw FitError("fit_order: need at least two points");
  if (all_same_T)
    throw FitError("fit_order: need at least two distinct hold periods");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fit_order(const std::vector<OrderSweepRow>& rows, int component) {
  if (component < 0 || component > 1)
    throw FitError("fit_order: component must be 0 or 1");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(rows.size());
  for (const OrderSweepRow& r : rows)
    pts.emplace_back(r.T, component == 0 ? r.err_z1 : r.err_z2);
  return fit_order(pts);
}

std::vector<OrderSweepRow> order_sweep(const ExactFlowOracle& oracle,
                                       const std::vector<double>& T_values,
                                       const GridBox& box) {
  if (box.points_per_axis < 2)
    throw ConfigError("order_sweep: need at least 2 grid points per axis");
  const int n = box.points_per_axis;
  auto lerp = [n](double lo, double hi, int i) {
    return lo + (hi - lo) * i / (n - 1);
  };

  std::vector<OrderSweepRow> rows;
  rows.reserve(T_values.size());
  for (const double T : T_values) {
    if (!(T > 0)) throw ConfigError("order_sweep: hold periods must be > 0");
    const ApproxModel model{T};
    OrderSweepRow row{T, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
          const Eigen::Vector2d z(lerp(box.z_lo(0), box.z_hi(0), i),
                                  lerp(box.z_lo(1), box.z_hi(1), j));
          const double u = lerp(box.u_lo, box.u_hi, m);
          const Eigen::Vector2d err = one_step_error(
              oracle, model, z, u, oracle.plant.alpha(z), oracle.plant.beta(z));
          row.err_z1 = std::max(row.err_z1, err(0));
          row.err_z2 = std::max(row.err_z2, err(1));
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ddfl
