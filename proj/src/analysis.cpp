#include "ddfl/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ddfl {

std::vector<LyapunovRow> lyapunov_trace(const TrajectoryLog& log) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<LyapunovRow> rows;
  rows.reserve(log.steps.size() + 1);
  for (const StepRecord& s : log.steps)
    rows.push_back({s.k, s.V, s.W, s.V + s.W, nan});
  if (log.has_terminal) {
    const StepRecord& s = log.terminal;
    rows.push_back({s.k, s.V, s.W, s.V + s.W, nan});
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    rows[i].delta = rows[i + 1].VW - rows[i].VW;
  return rows;
}

AnalysisReport analyze(const TrajectoryLog& log, double noise_amplitude) {
  AnalysisReport rep;
  rep.escape_step = log.escape_step;
  rep.realized_N = log.realized_N;
  rep.final_norm = log.final_state.norm();

  rep.max_state_norm = rep.final_norm;
  rep.max_pihat_norm = 0;
  for (const StepRecord& s : log.steps) {
    rep.max_state_norm = std::max(rep.max_state_norm, s.z.norm());
    rep.max_pihat_norm = std::max(rep.max_pihat_norm, s.pihat.vec().norm());
  }
  if (log.has_terminal)
    rep.max_pihat_norm =
        std::max(rep.max_pihat_norm, log.terminal.pihat.vec().norm());

  // Combined V + W must not increase while the state sits outside the slack
  // ball ||z|| <= 10 T; inside it the decrease argument makes no claim.
  const double ball = 10.0 * log.T;
  const std::vector<LyapunovRow> trace = lyapunov_trace(log);
  rep.lyapunov_violations = 0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const StepRecord& s = log.steps[i];
    if (s.k < 2) continue;  // startup / first observer step
    if (s.z.norm() <= ball) continue;
    if (trace[i].delta > 0) ++rep.lyapunov_violations;
  }

  // Largest decoupled innovation magnitude over the last quarter of steps.
  rep.phi_e_pi_tail = 0;
  const std::size_t tail_start = log.steps.size() - log.steps.size() / 4;
  for (std::size_t i = tail_start; i < log.steps.size(); ++i)
    if (std::isfinite(log.steps[i].phi_e_pi))
      rep.phi_e_pi_tail =
          std::max(rep.phi_e_pi_tail, std::abs(log.steps[i].phi_e_pi));

  const double threshold = std::max(1e-2, 10.0 * noise_amplitude);
  rep.converged = !log.failed && rep.final_norm < threshold &&
                  rep.lyapunov_violations == 0;
  rep.status = log.failed ? "failed" : (rep.converged ? "converged" : "bounded");
  return rep;
}

double empirical_order(const std::function<double(double)>& err_at_T,
                       const std::vector<double>& T_values) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(T_values.size());
  for (const double T : T_values) pts.emplace_back(T, err_at_T(T));
  return fit_order(pts);
}

std::vector<EstimatorSweepRow> estimator_error_sweep(
    const PlantModel& plant, int rho, const std::vector<double>& T_values) {
  // Pinned anchors: interior states with nonzero velocity plus a held input
  // for each, away from any symmetry that could cancel error terms.
  const std::array<std::pair<Eigen::Vector2d, double>, 3> anchors = {{
      {Eigen::Vector2d(0.5, 0.5), 0.0},
      {Eigen::Vector2d(-0.7, 0.3), 1.0},
      {Eigen::Vector2d(0.2, -0.6), -1.5},
  }};
  const ExactFlowOracle oracle{plant};

  std::vector<EstimatorSweepRow> rows;
  rows.reserve(T_values.size());
  for (const double T : T_values) {
    SamplingConfig cfg{T, rho};
    cfg.validate();
    const double delta = cfg.delta();
    EstimatorSweepRow row{T, 0, 0, 0};
    for (const auto& [z0, u] : anchors) {
      // March the true flow across the window; samples are noise-free.
      std::vector<double> y(rho);
      Eigen::Vector2d z = z0;
      y[rho - 1] = z(0);  // oldest sample, rho - 1 sub-intervals back
      for (int j = rho - 2; j >= 0; --j) {
        z = exact_flow(oracle, z, u, delta);
        y[j] = z(0);
      }
      // z now sits at the newest sample; the third chain state is the
      // instantaneous acceleration under the held input.
      const StateEstimate zhat = estimate_state(cfg, SampleWindow{y});
      const double z3_true = plant.alpha(z) + plant.beta(z) * u;
      row.err_z1 = std::max(row.err_z1, std::abs(zhat.z1_hat - z(0)));
      row.err_z2 = std::max(row.err_z2, std::abs(zhat.z2_hat - z(1)));
      row.err_z3 = std::max(row.err_z3, std::abs(zhat.z3_hat - z3_true));
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Unit-direction gain at anchor b: V(b + v(th)) - V(b) = v'Pv + 2 b'Pv.
double direction_gain(const Eigen::Matrix2d& P, const Eigen::Vector2d& b,
                      double th) {
  const Eigen::Vector2d v(std::cos(th), std::sin(th));
  return v.dot(P * v) + 2.0 * b.dot(P * v);
}

// Golden-section maximization of the direction gain on [th_lo, th_hi]; the
// bracket comes from a dense scan, so the maximum is interior and unimodal.
double refine_direction(const Eigen::Matrix2d& P, const Eigen::Vector2d& b,
                        double th_lo, double th_hi) {
  constexpr double invphi = 0.6180339887498949;
  double a = th_lo, d = th_hi;
  double x1 = d - invphi * (d - a);
  double x2 = a + invphi * (d - a);
  double f1 = direction_gain(P, b, x1);
  double f2 = direction_gain(P, b, x2);
  for (int it = 0; it < 80 && d - a > 1e-13; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (d - a);
      f2 = direction_gain(P, b, x2);
    } else {
      d = x2;
      x2 = x1;
      f2 = f1;
      x1 = d - invphi * (d - a);
      f1 = direction_gain(P, b, x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

double quadratic_bound_constant(const Eigen::Matrix2d& P,
                                const Eigen::Vector2d& lo,
                                const Eigen::Vector2d& hi,
                                int anchors_per_axis, int directions) {
  if (!(lo(0) <= hi(0)) || !(lo(1) <= hi(1)))
    throw Error("quadratic_bound_constant: empty anchor box");
  if (anchors_per_axis < 1 || directions < 4)
    throw Error("quadratic_bound_constant: degenerate sampling");

  auto V = [&P](const Eigen::Vector2d& x) { return x.dot(P * x); };

  double c = 0;
  Eigen::Vector2d best_b = (lo + hi) / 2;
  for (int i = 0; i < anchors_per_axis; ++i) {
    for (int j = 0; j < anchors_per_axis; ++j) {
      Eigen::Vector2d b;
      if (anchors_per_axis == 1) {
        b = (lo + hi) / 2;
      } else {
        b << lo(0) + (hi(0) - lo(0)) * i / (anchors_per_axis - 1),
            lo(1) + (hi(1) - lo(1)) * j / (anchors_per_axis - 1);
      }
      for (int d = 0; d < directions; ++d) {
        const double th = 2.0 * M_PI * d / directions;
        const double gain = V(b + Eigen::Vector2d(std::cos(th), std::sin(th))) -
                            V(b);
        if (gain > c) {
          c = gain;
          best_b = b;
        }
      }
    }
  }

  // The grid undercuts the true supremum by the direction quantization; close
  // the gap at the candidate maximizers. Per direction the gain is affine in
  // b, so the box maximum sits at a corner; the best grid anchor is kept in
  // case the scan was run on a degenerate (single-point) box.
  const std::array<Eigen::Vector2d, 5> candidates = {
      Eigen::Vector2d(lo(0), lo(1)), Eigen::Vector2d(lo(0), hi(1)),
      Eigen::Vector2d(hi(0), lo(1)), Eigen::Vector2d(hi(0), hi(1)), best_b};
  for (const auto& b : candidates) {
    double best_th = 0, best_gain = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < directions; ++d) {
      const double th = 2.0 * M_PI * d / directions;
      const double gain = direction_gain(P, b, th);
      if (gain > best_gain) {
        best_gain = gain;
        best_th = th;
      }
    }
    const double step = 2.0 * M_PI / directions;
    c = std::max(c, refine_direction(P, b, best_th - step, best_th + step));
  }

  // Small inflation so the certificate also covers samples that land between
  // refinement iterates; negligible against the 5% oracle comparison.
  return c + 1e-9;
}

}  // namespace ddfl
