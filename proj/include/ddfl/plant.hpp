#ifndef DDFL_PLANT_HPP
#define DDFL_PLANT_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ddfl/errors.hpp"

namespace ddfl {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

// Continuous-time SISO plant in normal form:
//   z1' = z2,  z2' = alpha(z) + beta(z) * u,  y = z1 + d.
// The gain is assumed bounded, 0 < beta_low <= beta(z) <= beta_high; the
// controller only ever sees the bounds, never alpha/beta themselves.
struct PlantModel {
  ScalarField alpha_fn;
  ScalarField beta_fn;
  std::pair<double, double> beta_bounds{0.4, 2.5};
  std::string name;

  double alpha(const Eigen::Vector2d& z) const { return alpha_fn(z); }
  double beta(const Eigen::Vector2d& z) const { return beta_fn(z); }
};

// Samples beta on a grid over [lo, hi]^2 and throws InvalidPlantError if any
// sample is non-finite, non-positive, or outside the declared bounds.
void check_beta_bounds(const PlantModel& plant, const Eigen::Vector2d& lo,
                       const Eigen::Vector2d& hi, int points_per_axis = 21);

// Reference flow under a held input, used wherever "the true plant" is
// needed: simulation ground truth and model-error measurements. Tolerances
// are tight enough that its output stands in for the exact solution at
// every tolerance used by the tests.
struct ExactFlowOracle {
  PlantModel plant;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double guard_norm = 1e6;
};

// State reached from z0 after holding u for t seconds (t >= 0).
// Throws FiniteEscapeError if the trajectory leaves the guard ball first.
Eigen::Vector2d exact_flow(const ExactFlowOracle& oracle,
                           const Eigen::Vector2d& z0, double u, double t);

// Input making the origin an equilibrium: u* = -alpha(0) / beta(0).
// Throws InvalidPlantError when beta(0) == 0.
double equilibrium_input(const PlantModel& plant);

// Fixed parametric family for user-defined plants:
//   f(z) = c00 + c10 z1 + c01 z2 + c20 z1^2 + c11 z1 z2 + c02 z2^2
//        + s1 sin(w1 z1) + s2 sin(w2 z2)
struct ParametricFn {
  double c00 = 0, c10 = 0, c01 = 0, c20 = 0, c11 = 0, c02 = 0;
  double s1 = 0, w1 = 1, s2 = 0, w2 = 1;
  double operator()(const Eigen::Vector2d& z) const;
};

// Builds a plant from the parametric family and runs the gain grid check
// over [-2, 2]^2 before returning it.
PlantModel make_parametric_plant(const std::string& name,
                                 const ParametricFn& alpha,
                                 const ParametricFn& beta,
                                 std::pair<double, double> beta_bounds);

// Built-in corpus. Every member passes check_beta_bounds on [-2, 2]^2 and
// has alpha(0) = 0 so the origin is an equilibrium under u = 0.
std::vector<PlantModel> builtin_plants();

// Lookup by name; throws ConfigError listing the known names on a miss.
PlantModel find_plant(const std::string& name);

}  // namespace ddfl

#endif  // DDFL_PLANT_HPP
