#ifndef DDFL_PARAM_OBSERVER_HPP
#define DDFL_PARAM_OBSERVER_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "ddfl/errors.hpp"

namespace ddfl {

struct ObserverConfig {
  double gamma = 1.0;       // update gain used when no schedule is supplied
  double gamma_low = 1.0;   // admissible gain interval for schedules
  double gamma_high = 1.0;
  double lambda_pi = 1.0;   // required decrease rate; must satisfy lambda_pi < 2 gamma_low

  // Clamp interval for beta_hat. Off by default in the raw config; the run
  // builder enables it with the plant's stated bounds.
  std::optional<std::pair<double, double>> projection;

  // Without projection, |beta_hat| is kept >= beta_floor (sign preserved,
  // zero pushed to +beta_floor) so the control law never divides by zero.
  double beta_floor = 1e-3;

  void validate() const;  // throws ConfigError on any violated range
};

struct ParamEstimate {
  double alpha_hat = 0;
  double beta_hat = 1;

  Eigen::Vector2d vec() const { return Eigen::Vector2d(alpha_hat, beta_hat); }
};

// alpha_hat = 0; beta_hat = geometric mean of the bounds when known, 1
// otherwise.
ParamEstimate initial_estimate(
    std::optional<std::pair<double, double>> beta_bounds);

// Regressor paired with the parameter vector (alpha, beta): velocity
// increments obey  z2(k+1) - z2(k) ~= T * phi(u)^T (alpha, beta).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> regressor(Scalar u) {
  return Eigen::Matrix<Scalar, 2, 1>(Scalar(1), u);
}

// Clamp of the gain estimate to [lo, hi]. Non-expansive: moving both
// arguments through the clamp never increases their distance.
template <typename Scalar>
Scalar project_beta(Scalar lo, Scalar hi, Scalar r) {
  return r < lo ? lo : (r > hi ? hi : r);
}

// One gradient-style update driven by the estimated velocity increment:
//   pi+ = pi + gamma * phi * (z2hat_new - z2hat_old - T * phi^T pi)
// followed by projection (or the sign-preserving floor) on the gain entry.
// u_prev is the input held while the two state estimates were formed.
// Throws ObserverError on non-finite inputs.
ParamEstimate observer_step(const ObserverConfig& cfg, const ParamEstimate& pi,
                            double u_prev, double z2hat_new, double z2hat_old,
                            double T);

// Same update with an explicit per-step gain (entry point for gain
// schedules). gamma_k outside [gamma_low, gamma_high] throws ObserverError.
ParamEstimate observer_step_with_gain(const ObserverConfig& cfg,
                                      const ParamEstimate& pi, double u_prev,
                                      double z2hat_new, double z2hat_old,
                                      double T, double gamma_k);

// Largest hold period for which the noise-free error energy certifiably
// decays at rate lambda_pi under inputs bounded by 1 + u^2 <= N:
//   T0 = (2 gamma_low - lambda_pi) / (gamma_high^2 * N).
// Throws ConfigError when N < 1 or the config violates lambda_pi < 2 gamma_low.
double admissible_T0(const ObserverConfig& cfg, double N);

}  // namespace ddfl

#endif  // DDFL_PARAM_OBSERVER_HPP
