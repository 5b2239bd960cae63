#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "ddfl/approx_model.hpp"
#include "ddfl/plant.hpp"

TEST_CASE("one hold period of the model in closed form") {
  const Eigen::Vector2d z(1, 2);
  const Eigen::Vector2d zp = ddfl::taylor_step(0.1, z, 1.0, 2.0, 0.5);
  // accel = 1 + 2 * 0.5 = 2: z1 + 0.2 + 0.01, z2 + 0.2
  CHECK(zp(0) == doctest::Approx(1.21).epsilon(1e-15));
  CHECK(zp(1) == doctest::Approx(2.2).epsilon(1e-15));

  const ddfl::ApproxModel model{0.1};
  CHECK((model.step(z, 1.0, 2.0, 0.5) - zp).norm() == 0.0);
}

TEST_CASE("model is exact on a constant-parameter plant") {
  const ddfl::ExactFlowOracle oracle{ddfl::find_plant("point-mass-1")};
  const ddfl::ApproxModel model{0.05};
  const Eigen::Vector2d err = ddfl::one_step_error(
      oracle, model, Eigen::Vector2d(0.3, -0.4), 1.2, 0.0, 1.0);
  CHECK(err(0) <= 1e-12);
  CHECK(err(1) <= 1e-12);
}

TEST_CASE("slope fit recovers exact power laws") {
  std::vector<std::pair<double, double>> cubic, quadratic;
  for (double T : {0.1, 0.05, 0.025, 0.0125}) {
    cubic.emplace_back(T, 2.0 * T * T * T);
    quadratic.emplace_back(T, 0.7 * T * T);
  }
  CHECK(ddfl::fit_order(cubic) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(ddfl::fit_order(quadratic) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("slope fit rejects degenerate data") {
  using pairs = std::vector<std::pair<double, double>>;
  CHECK_THROWS_AS(ddfl::fit_order(pairs{{0.1, 1e-3}}), ddfl::FitError);
  CHECK_THROWS_AS(ddfl::fit_order(pairs{{0.1, 1e-3}, {0.1, 2e-3}}),
                  ddfl::FitError);
  CHECK_THROWS_AS(ddfl::fit_order(pairs{{0.1, 0.0}, {0.05, 1e-4}}),
                  ddfl::FitError);
  CHECK_THROWS_AS(ddfl::fit_order(pairs{{-0.1, 1e-3}, {0.05, 1e-4}}),
                  ddfl::FitError);
}

TEST_CASE("component slope fit reads sweep rows") {
  std::vector<ddfl::OrderSweepRow> rows;
  for (double T : {0.2, 0.1, 0.05})
    rows.push_back({T, 3.0 * T * T * T, 0.5 * T * T});
  CHECK(ddfl::fit_order(rows, 0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(ddfl::fit_order(rows, 1) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("worst-case errors shrink at the advertised orders") {
  const ddfl::ExactFlowOracle oracle{ddfl::find_plant("nonlinear-1")};
  const std::vector<double> Ts{0.1, 0.05, 0.025, 0.0125};
  const auto rows = ddfl::order_sweep(oracle, Ts);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].T == Ts[i]);
    CHECK(rows[i].err_z1 > 0);
    CHECK(rows[i].err_z2 > rows[i].err_z1);  // one order less accurate
  }
  const double s1 = ddfl::fit_order(rows, 0);
  const double s2 = ddfl::fit_order(rows, 1);
  CHECK(s1 > 2.7);
  CHECK(s1 < 3.3);
  CHECK(s2 > 1.7);
  CHECK(s2 < 2.3);
}

TEST_CASE("sweep grid must have at least two points per axis") {
  const ddfl::ExactFlowOracle oracle{ddfl::find_plant("point-mass-1")};
  ddfl::GridBox box;
  box.points_per_axis = 1;
  CHECK_THROWS_AS(ddfl::order_sweep(oracle, {0.1, 0.05}, box), ddfl::Error);
}
