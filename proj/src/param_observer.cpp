#include "ddfl/param_observer.hpp"

#include <cmath>

namespace ddfl {

void ObserverConfig::validate() const {
  if (!(gamma_low > 0) || !(gamma_high >= gamma_low))
    throw ConfigError("observer: need 0 < gamma_low <= gamma_high");
  if (!(gamma >= gamma_low) || !(gamma <= gamma_high))
    throw ConfigError("observer: gamma must lie in [gamma_low, gamma_high]");
  if (!(lambda_pi > 0) || !(lambda_pi < 2 * gamma_low))
    throw ConfigError("observer: need 0 < lambda_pi < 2 * gamma_low");
  if (!(beta_floor > 0))
    throw ConfigError("observer: beta_floor must be positive");
  if (projection) {
    const auto [lo, hi] = *projection;
    if (!(lo > 0) || !(hi >= lo))
      throw ConfigError("observer: projection interval needs 0 < low <= high");
  }
  for (double v : {gamma, gamma_low, gamma_high, lambda_pi, beta_floor})
    if (!std::isfinite(v))
      throw ConfigError("observer: non-finite parameter");
}

ParamEstimate initial_estimate(
    std::optional<std::pair<double, double>> beta_bounds) {
  ParamEstimate pi;
  pi.alpha_hat = 0.0;
  pi.beta_hat = beta_bounds ? std::sqrt(beta_bounds->first * beta_bounds->second)
                            : 1.0;
  return pi;
}

ParamEstimate observer_step_with_gain(const ObserverConfig& cfg,
                                      const ParamEstimate& pi, double u_prev,
                                      double z2hat_new, double z2hat_old,
                                      double T, double gamma_k) {
  if (!(gamma_k >= cfg.gamma_low) || !(gamma_k <= cfg.gamma_high))
    throw ObserverError("observer: scheduled gain " + std::to_string(gamma_k) +
                        " outside [gamma_low, gamma_high]");
  for (double v : {pi.alpha_hat, pi.beta_hat, u_prev, z2hat_new, z2hat_old, T})
    if (!std::isfinite(v))
      throw ObserverError("observer: non-finite input to update");
  if (!(T > 0)) throw ObserverError("observer: hold period must be positive");

  // Gradient step on the velocity-increment residual.
  const Eigen::Vector2d phi = regressor(u_prev);
  const double innovation =
      z2hat_new - z2hat_old - T * phi.dot(pi.vec());
  Eigen::Vector2d next = pi.vec() + gamma_k * phi * innovation;

  ParamEstimate out;
  out.alpha_hat = next(0);
  if (cfg.projection) {
    out.beta_hat = project_beta(cfg.projection->first, cfg.projection->second,
                                next(1));
  } else if (std::abs(next(1)) < cfg.beta_floor) {
    // Keep the sign so a learning trajectory is not yanked across zero;
    // exact zero is pushed to the positive side.
    out.beta_hat = next(1) < 0 ? -cfg.beta_floor : cfg.beta_floor;
  } else {
    out.beta_hat = next(1);
  }
  return out;
}

ParamEstimate observer_step(const ObserverConfig& cfg, const ParamEstimate& pi,
                            double u_prev, double z2hat_new, double z2hat_old,
                            double T) {
  return observer_step_with_gain(cfg, pi, u_prev, z2hat_new, z2hat_old, T,
                                 cfg.gamma);
}

double admissible_T0(const ObserverConfig& cfg, double N) {
  cfg.validate();
  if (!(N >= 1))
    throw ConfigError("admissible_T0: input bound N = 1 + max u^2 is >= 1");
  return (2 * cfg.gamma_low - cfg.lambda_pi) / (cfg.gamma_high * cfg.gamma_high * N);
}

}  // namespace ddfl
