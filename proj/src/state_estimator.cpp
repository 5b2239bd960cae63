#include "ddfl/state_estimator.hpp"

#include <cmath>

namespace ddfl {

void SamplingConfig::validate() const {
  if (!(T > 0) || !std::isfinite(T))
    throw ConfigError("sampling: hold period T must be positive");
  if (rho < 3)
    throw ConfigError(
        "sampling: rho must be >= 3 (three samples reconstruct the chain)");
}

Eigen::Matrix3d build_subsample_matrix(const SamplingConfig& cfg) {
  cfg.validate();
  return subsample_matrix(cfg.delta());
}

Eigen::Matrix<double, Eigen::Dynamic, 3> build_observability_matrix(
    const SamplingConfig& cfg) {
  cfg.validate();
  return observability_matrix(cfg.rho, cfg.delta());
}

StateEstimatorKernel::StateEstimatorKernel(const SamplingConfig& cfg)
    : rho_(cfg.rho),
      obs_(build_observability_matrix(cfg)),
      qr_(obs_) {
  if (qr_.rank() < 3)
    throw EstimatorError("state estimator: observability matrix lost rank");
}

StateEstimate StateEstimatorKernel::solve(const SampleWindow& window) const {
  if (static_cast<int>(window.samples.size()) != rho_)
    throw EstimatorError("state estimator: window has " +
                         std::to_string(window.samples.size()) +
                         " samples, expected " + std::to_string(rho_));
  Eigen::VectorXd y(rho_);
  for (int j = 0; j < rho_; ++j) {
    if (!std::isfinite(window.samples[j]))
      throw EstimatorError("state estimator: non-finite sample in window");
    y(j) = window.samples[j];
  }
  const Eigen::Vector3d x = qr_.solve(y);
  if (!x.allFinite())
    throw EstimatorError("state estimator: least-squares solve not finite");
  return StateEstimate{x(0), x(1), x(2)};
}

StateEstimate estimate_state(const SamplingConfig& cfg,
                             const SampleWindow& window) {
  return StateEstimatorKernel(cfg).solve(window);
}

}  // namespace ddfl
