#include "ddfl/plant.hpp"

#include <cmath>

#include "ddfl/runge_kutta.hpp"

namespace ddfl {

void check_beta_bounds(const PlantModel& plant, const Eigen::Vector2d& lo,
                       const Eigen::Vector2d& hi, int points_per_axis) {
  if (points_per_axis < 2)
    throw ConfigError("check_beta_bounds: need at least 2 points per axis");
  const auto [b_lo, b_hi] = plant.beta_bounds;
  if (!(b_lo > 0) || !(b_hi >= b_lo))
    throw InvalidPlantError("plant '" + plant.name +
                            "': gain bounds must satisfy 0 < low <= high");
  for (int i = 0; i < points_per_axis; ++i) {
    for (int j = 0; j < points_per_axis; ++j) {
      Eigen::Vector2d z(
          lo(0) + (hi(0) - lo(0)) * i / (points_per_axis - 1),
          lo(1) + (hi(1) - lo(1)) * j / (points_per_axis - 1));
      const double b = plant.beta(z);
      if (!std::isfinite(b) || b <= 0 || b < b_lo || b > b_hi)
        throw InvalidPlantError(
            "plant '" + plant.name + "': beta(z) = " + std::to_string(b) +
            " violates [" + std::to_string(b_lo) + ", " +
            std::to_string(b_hi) + "] at z = (" + std::to_string(z(0)) +
            ", " + std::to_string(z(1)) + ")");
    }
  }
}

Eigen::Vector2d exact_flow(const ExactFlowOracle& oracle,
                           const Eigen::Vector2d& z0, double u, double t) {
  if (!(t >= 0)) throw Error("exact_flow: hold time must be >= 0");
  const PlantModel& p = oracle.plant;
  auto rhs = [&p, u](const Eigen::Vector2d& z) {
    return Eigen::Vector2d(z(1), p.alpha(z) + p.beta(z) * u);
  };
  return integrate_dopri5<double, 2>(rhs, z0, t, oracle.rel_tol,
                                     oracle.abs_tol, oracle.guard_norm);
}

double equilibrium_input(const PlantModel& plant) {
  const Eigen::Vector2d origin(0, 0);
  const double b0 = plant.beta(origin);
  if (b0 == 0)
    throw InvalidPlantError("plant '" + plant.name +
                            "': beta(0) = 0, no equilibrium input exists");
  return -plant.alpha(origin) / b0;
}

double ParametricFn::operator()(const Eigen::Vector2d& z) const {
  const double z1 = z(0), z2 = z(1);
  return c00 + c10 * z1 + c01 * z2 + c20 * z1 * z1 + c11 * z1 * z2 +
         c02 * z2 * z2 + s1 * std::sin(w1 * z1) + s2 * std::sin(w2 * z2);
}

PlantModel make_parametric_plant(const std::string& name,
                                 const ParametricFn& alpha,
                                 const ParametricFn& beta,
                                 std::pair<double, double> beta_bounds) {
  PlantModel plant;
  plant.name = name;
  plant.alpha_fn = alpha;
  plant.beta_fn = beta;
  plant.beta_bounds = beta_bounds;
  check_beta_bounds(plant, Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2));
  return plant;
}

namespace {

PlantModel point_mass(const std::string& name, double mass) {
  PlantModel plant;
  plant.name = name;
  plant.alpha_fn = [](const Eigen::Vector2d&) { return 0.0; };
  plant.beta_fn = [mass](const Eigen::Vector2d&) { return 1.0 / mass; };
  plant.beta_bounds = {0.4, 2.5};
  return plant;
}

}  // namespace

std::vector<PlantModel> builtin_plants() {
  std::vector<PlantModel> plants;
  plants.push_back(point_mass("point-mass-0.5", 0.5));
  plants.push_back(point_mass("point-mass-1", 1.0));
  plants.push_back(point_mass("point-mass-2", 2.0));

  {
    PlantModel p;
    p.name = "nonlinear-1";
    p.alpha_fn = [](const Eigen::Vector2d& z) { return z(0) * z(1) - z(0); };
    p.beta_fn = [](const Eigen::Vector2d& z) { return 2.0 + std::sin(z(0)); };
    p.beta_bounds = {1.0, 3.0};
    plants.push_back(p);
  }
  {
    // Low gain hugging the floor of a narrow bound interval, so the
    // certainty-equivalence division works with small denominators.
    PlantModel p;
    p.name = "stiff-gain-1";
    p.alpha_fn = [](const Eigen::Vector2d& z) { return 0.3 * z(0) * z(1); };
    p.beta_fn = [](const Eigen::Vector2d& z) {
      return 0.45 + 0.04 * std::sin(z(0));
    };
    p.beta_bounds = {0.4, 0.5};
    plants.push_back(p);
  }

  for (const PlantModel& p : plants)
    check_beta_bounds(p, Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2));
  return plants;
}

PlantModel find_plant(const std::string& name) {
  std::string known;
  for (const PlantModel& p : builtin_plants()) {
    if (p.name == name) return p;
    known += known.empty() ? p.name : ", " + p.name;
  }
  throw ConfigError("unknown plant '" + name + "' (known: " + known + ")");
}

}  // namespace ddfl
