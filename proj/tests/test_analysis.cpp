#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ddfl/analysis.hpp"
#include "ddfl/plant.hpp"

namespace {

ddfl::StepRecord step(int k, Eigen::Vector2d z, double V, double W,
                      double phi) {
  ddfl::StepRecord s;
  s.k = k;
  s.z = z;
  s.V = V;
  s.W = W;
  s.phi_e_pi = phi;
  return s;
}

// Eight completed steps with hand-set Lyapunov values; T = 0.01 puts the
// slack ball at ||z|| <= 0.1.
ddfl::TrajectoryLog synthetic_log() {
  ddfl::TrajectoryLog log;
  log.T = 0.01;
  log.rho = 3;
  log.realized_N = 4.25;
  log.steps = {
      step(0, {1.00, 0}, 1.00, 0.50, 0.0),
      step(1, {0.90, 0}, 0.90, 0.45, 0.2),
      step(2, {0.80, 0}, 0.80, 0.40, 0.1),   // outside ball, VW rises: count
      step(3, {0.05, 0}, 0.70, 0.60, 0.05),  // inside ball, VW rises: ignore
      step(4, {0.60, 0}, 0.75, 0.60, 0.02),
      step(5, {0.40, 0}, 0.50, 0.40, 0.01),
      step(6, {0.20, 0}, 0.30, 0.20, 4e-4),
      step(7, {0.10, 0}, 0.10, 0.10, -3e-4),
  };
  log.terminal = step(8, {0.03, 0}, 0.05, 0.05,
                      std::numeric_limits<double>::quiet_NaN());
  log.has_terminal = true;
  log.final_state = log.terminal.z;
  return log;
}

}  // namespace

TEST_CASE("the Lyapunov trace carries forward differences") {
  const auto log = synthetic_log();
  const auto trace = ddfl::lyapunov_trace(log);
  REQUIRE(trace.size() == 9);  // steps plus terminal
  CHECK(trace[0].VW == 1.5);
  CHECK(trace[0].delta == doctest::Approx(-0.15).epsilon(1e-12));
  CHECK(trace[2].delta == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(trace[8].k == 8);
  CHECK(std::isnan(trace[8].delta));
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    CHECK(trace[i].delta ==
          doctest::Approx(trace[i + 1].VW - trace[i].VW).epsilon(1e-12));
}

TEST_CASE("violation counting respects the slack ball and startup") {
  const auto log = synthetic_log();
  const auto rep = ddfl::analyze(log, 0.0);
  // k = 2 rises outside the ball; k = 3 rises inside it; k = 0 and 1 are
  // startup and never counted even though VW moves.
  CHECK(rep.lyapunov_violations == 1);
  CHECK(rep.realized_N == 4.25);
  CHECK(rep.escape_step == -1);
  CHECK(rep.final_norm == 0.03);
  CHECK(rep.max_state_norm == 1.0);
}

TEST_CASE("the innovation tail is the max over the last quarter") {
  const auto log = synthetic_log();
  const auto rep = ddfl::analyze(log, 0.0);
  // Last quarter of 8 steps: k = 6 and 7; the terminal NaN is skipped.
  CHECK(rep.phi_e_pi_tail == 4e-4);
}

TEST_CASE("the convergence threshold scales with the noise amplitude") {
  auto log = synthetic_log();
  // One violation at k = 2: never converged regardless of the final norm.
  CHECK_FALSE(ddfl::analyze(log, 0.0).converged);
  log.steps[2].W = 0.55;  // VW(2) = 1.35 >= VW(3): no violations left
  const auto quiet = ddfl::analyze(log, 0.0);
  CHECK(quiet.lyapunov_violations == 0);
  CHECK_FALSE(quiet.converged);  // final 0.03 >= 1e-2
  CHECK(quiet.status == "bounded");
  const auto noisy = ddfl::analyze(log, 5e-3);  // threshold max(1e-2, 5e-2)
  CHECK(noisy.converged);
  CHECK(noisy.status == "converged");
}

TEST_CASE("a failed run reports failure whatever the numbers say") {
  auto log = synthetic_log();
  log.failed = true;
  log.has_terminal = false;
  log.escape_step = 5;
  log.final_state = Eigen::Vector2d(1e-4, 0);
  const auto rep = ddfl::analyze(log, 0.0);
  CHECK(rep.status == "failed");
  CHECK_FALSE(rep.converged);
  CHECK(rep.escape_step == 5);
}

TEST_CASE("slope extraction from an error functional") {
  const std::vector<double> Ts{0.1, 0.05, 0.025};
  CHECK(ddfl::empirical_order([](double T) { return 4 * T * T * T; }, Ts) ==
        doctest::Approx(3.0).epsilon(1e-10));
  CHECK(ddfl::empirical_order([](double T) { return 0.2 * T * T; }, Ts) ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("window reconstruction errors fall at rates 3, 2, 1") {
  // Four samples per window: the smallest overdetermined fit, where all
  // three components carry genuine truncation error.
  const auto rows = ddfl::estimator_error_sweep(ddfl::find_plant("nonlinear-1"),
                                                4, {0.1, 0.05, 0.025, 0.0125});
  REQUIRE(rows.size() == 4);
  std::vector<std::pair<double, double>> e1, e2, e3;
  for (const auto& r : rows) {
    e1.emplace_back(r.T, r.err_z1);
    e2.emplace_back(r.T, r.err_z2);
    e3.emplace_back(r.T, r.err_z3);
  }
  const double s1 = ddfl::fit_order(e1);
  const double s2 = ddfl::fit_order(e2);
  const double s3 = ddfl::fit_order(e3);
  CHECK(s1 > 2.6);
  CHECK(s1 < 3.4);
  CHECK(s2 > 1.6);
  CHECK(s2 < 2.4);
  CHECK(s3 > 0.6);
  CHECK(s3 < 1.4);
}

TEST_CASE("three-sample windows interpolate the newest output exactly") {
  // With rho = 3 the quadratic fit has as many parameters as samples, so
  // the position estimate reproduces the newest sample to rounding and its
  // "error" has no decay rate to measure; velocity and acceleration keep
  // their honest rates.
  const auto rows = ddfl::estimator_error_sweep(ddfl::find_plant("nonlinear-1"),
                                                3, {0.1, 0.05, 0.025, 0.0125});
  for (const auto& r : rows) CHECK(r.err_z1 < 1e-12);
  std::vector<std::pair<double, double>> e2, e3;
  for (const auto& r : rows) {
    e2.emplace_back(r.T, r.err_z2);
    e3.emplace_back(r.T, r.err_z3);
  }
  CHECK(std::abs(ddfl::fit_order(e2) - 2.0) < 0.4);
  CHECK(std::abs(ddfl::fit_order(e3) - 1.0) < 0.4);
}

TEST_CASE("quadratic bound constant: analytic value and certificate") {
  const Eigen::Vector2d lo(-1, -1), hi(1, 1);
  const double c =
      ddfl::quadratic_bound_constant(Eigen::Matrix2d::Identity(), lo, hi);
  // sup over the box of 1 + 2 b.v with ||v|| = 1 is 1 + 2 sqrt(2) at a
  // corner, direction aligned with the anchor.
  const double analytic = 3.8284271247461903;
  CHECK(c >= analytic);
  CHECK(c <= analytic + 1e-6);

  // Certificate property on fresh pairs.
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  double worst = 0;
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector2d b(box(eng), box(eng));
    const double th = angle(eng);
    const Eigen::Vector2d a = b + Eigen::Vector2d(std::cos(th), std::sin(th));
    worst = std::max(worst, std::abs(a.squaredNorm() - b.squaredNorm()));
  }
  CHECK(worst <= c);
}

TEST_CASE("quadratic bound constant: degenerate boxes") {
  const Eigen::Vector2d origin(0, 0);
  Eigen::Matrix2d P;
  P << 2, 0, 0, 0.5;
  // Single anchor at the origin: sup of v'Pv over the circle is the top
  // eigenvalue.
  const double c = ddfl::quadratic_bound_constant(P, origin, origin, 1, 64);
  CHECK(c >= 2.0);
  CHECK(c <= 2.0 + 1e-6);

  CHECK_THROWS_AS(ddfl::quadratic_bound_constant(
                      P, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 5, 64),
                  ddfl::Error);
  CHECK_THROWS_AS(ddfl::quadratic_bound_constant(P, origin, origin, 0, 64),
                  ddfl::Error);
}
