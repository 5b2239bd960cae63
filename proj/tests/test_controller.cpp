#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ddfl/controller.hpp"

TEST_CASE("hold-model matrices for one period") {
  const Eigen::Matrix2d A = ddfl::hold_a(0.1);
  CHECK(A(0, 0) == 1.0);
  CHECK(A(0, 1) == 0.1);
  CHECK(A(1, 0) == 0.0);
  CHECK(A(1, 1) == 1.0);
  const Eigen::Vector2d B = ddfl::hold_b(0.1);
  CHECK(B(0) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(B(1) == 0.1);
}

TEST_CASE("closed-form Lyapunov solve on a known instance") {
  const Eigen::RowVector2d K(-1, -2);
  const Eigen::Matrix2d P = ddfl::lyapunov_solve(K, Eigen::Matrix2d::Identity());
  CHECK(P(0, 0) == 1.5);
  CHECK(P(0, 1) == 0.5);
  CHECK(P(1, 0) == 0.5);
  CHECK(P(1, 1) == 0.5);

  ddfl::ControllerGains g;
  g.K = K;
  g.P = P;
  g.Q = Eigen::Matrix2d::Identity();
  CHECK(ddfl::lyapunov_residual(g) <= 1e-15);

  CHECK_THROWS_AS(
      ddfl::lyapunov_solve(Eigen::RowVector2d(1, -2), Eigen::Matrix2d::Identity()),
      ddfl::SynthesisError);
  CHECK_THROWS_AS(
      ddfl::lyapunov_solve(Eigen::RowVector2d(-1, 0), Eigen::Matrix2d::Identity()),
      ddfl::SynthesisError);
}

TEST_CASE("pole placement hits the requested poles with a valid certificate") {
  const ddfl::ControllerGains g = ddfl::design_gains(-1, -2);
  CHECK(g.K(0) == -2.0);  // -p1 p2
  CHECK(g.K(1) == -3.0);  // p1 + p2
  CHECK(ddfl::lyapunov_residual(g) <= 1e-14);
  CHECK(ddfl::min_eigenvalue_sym2(g.P) > 0);

  const auto poles = ddfl::closed_loop_poles(g.K);
  CHECK(poles[0].real() == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(poles[1].real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(poles[0].imag() == 0.0);
  CHECK(poles[1].imag() == 0.0);
}

TEST_CASE("repeated poles survive the quadratic") {
  const ddfl::ControllerGains g = ddfl::design_gains(-3, -3);
  CHECK(g.K(0) == -9.0);
  CHECK(g.K(1) == -6.0);
  const auto poles = ddfl::closed_loop_poles(g.K);
  CHECK(poles[0].real() == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(poles[1].real() == doctest::Approx(-3.0).epsilon(1e-10));
}

TEST_CASE("complex pair from an underdamped gain") {
  // s^2 + s + 1: roots -1/2 +- i sqrt(3)/2.
  const auto poles = ddfl::closed_loop_poles(Eigen::RowVector2d(-1, -1));
  CHECK(poles[0].real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(poles[1].real() == doctest::Approx(-0.5).epsilon(1e-12));
  const double im = std::sqrt(3.0) / 2.0;
  CHECK(std::abs(poles[0].imag()) == doctest::Approx(im).epsilon(1e-12));
  CHECK(poles[0].imag() == doctest::Approx(-poles[1].imag()).epsilon(1e-12));
}

TEST_CASE("design rejects unstable requests and bad certificates") {
  CHECK_THROWS_AS(ddfl::design_gains(1, -2), ddfl::ConfigError);
  CHECK_THROWS_AS(ddfl::design_gains(0, -2), ddfl::ConfigError);
  CHECK_THROWS_AS(ddfl::design_gains(std::nan(""), -2), ddfl::ConfigError);

  Eigen::Matrix2d indefinite;
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(ddfl::design_gains(-1, -2, indefinite), ddfl::ConfigError);

  Eigen::Matrix2d asymmetric;
  asymmetric << 1, 0.1, 0, 1;
  CHECK_THROWS_AS(ddfl::design_gains(-1, -2, asymmetric), ddfl::ConfigError);
}

TEST_CASE("certificate holds for a non-identity decrease rate") {
  Eigen::Matrix2d Q;
  Q << 2, 0.3, 0.3, 1;
  const ddfl::ControllerGains g = ddfl::design_gains(-0.5, -3, Q);
  CHECK(ddfl::lyapunov_residual(g) <= 1e-14);
  CHECK(ddfl::min_eigenvalue_sym2(g.P) > 0);
  const auto poles = ddfl::closed_loop_poles(g.K);
  CHECK(poles[0].real() == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(poles[1].real() == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("smaller symmetric eigenvalue in closed form") {
  Eigen::Matrix2d D;
  D << 2, 0, 0, 5;
  CHECK(ddfl::min_eigenvalue_sym2(D) == 2.0);
  Eigen::Matrix2d P;
  P << 1.5, 0.5, 0.5, 0.5;
  CHECK(ddfl::min_eigenvalue_sym2(P) ==
        doctest::Approx(0.2928932188134524).epsilon(1e-14));
}

TEST_CASE("certainty-equivalence input and its divide guard") {
  const ddfl::ControllerGains g = ddfl::design_gains(-1, -2);
  ddfl::ParamEstimate pi;
  pi.alpha_hat = 1;
  pi.beta_hat = 2;
  ddfl::StateEstimate zhat;
  zhat.z1_hat = 1;
  zhat.z2_hat = 0;
  CHECK(ddfl::control_law(g, pi, zhat) == -1.5);

  pi.beta_hat = 1e-9;
  CHECK_THROWS_AS(ddfl::control_law(g, pi, zhat), ddfl::ControllerFaultError);
  CHECK_NOTHROW(ddfl::control_law(g, pi, zhat, 1e-12));
}
