#ifndef DDFL_ANALYSIS_HPP
#define DDFL_ANALYSIS_HPP

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "ddfl/approx_model.hpp"
#include "ddfl/closed_loop.hpp"
#include "ddfl/controller.hpp"
#include "ddfl/plant.hpp"

namespace ddfl {

// Per-step Lyapunov bookkeeping; delta is the forward difference
// (V+W)(k+1) - (V+W)(k), NaN on the last row.
struct LyapunovRow {
  int k = 0;
  double V = 0;
  double W = 0;
  double VW = 0;
  double delta = 0;
};

// Rebuilds the V / W trace from a log (terminal record included).
std::vector<LyapunovRow> lyapunov_trace(const TrajectoryLog& log);

struct AnalysisReport {
  bool converged = false;
  std::string status;       // "converged", "bounded", or "failed"
  double final_norm = 0;
  double max_state_norm = 0;
  double max_pihat_norm = 0;
  int lyapunov_violations = 0;
  double phi_e_pi_tail = 0;  // max |phi^T e_pi| over the last quarter of steps
  double realized_N = 1;
  int escape_step = -1;
};

// Convergence verdict and diagnostics for one run. A Lyapunov violation is a
// step k >= 2 with ||z(k)|| > 10 T whose combined V+W increased; inside that
// slack ball the decrease argument makes no claim. Converged means: the run
// completed, final ||z|| < max(1e-2, 10 * noise_amplitude), and no
// violations were counted.
AnalysisReport analyze(const TrajectoryLog& log, double noise_amplitude);

// Fits the slope of log(err) against log(T) by evaluating err_at_T at each
// supplied hold period. Degenerate data throws FitError.
double empirical_order(const std::function<double(double)>& err_at_T,
                       const std::vector<double>& T_values);

// Worst-case reconstruction errors of the window estimator against the
// reference flow, one row per hold period; the anchor states and inputs are
// a small pinned set. Component errors shrink like T^3, T^2, T^1 — except
// that at rho = 3 the quadratic fit interpolates, so the position error is
// rounding noise with no rate to measure; use rho >= 4 to observe all three.
struct EstimatorSweepRow {
  double T;
  double err_z1;
  double err_z2;
  double err_z3;
};

std::vector<EstimatorSweepRow> estimator_error_sweep(
    const PlantModel& plant, int rho, const std::vector<double>& T_values);

// Certified constant c with |V(a) - V(b)| <= c ||a - b||^2 over
// unit-difference pairs anchored in the box: a = b + v, b in [lo, hi]^2,
// ||v|| = 1. A dense scan of anchors and directions locates the maximizer;
// the direction angle is then refined by golden section at the box corners
// (the objective is affine in b per direction, so the box maximum sits at a
// corner) and a 1e-9 margin is added so the result upper-bounds every fresh
// sample, not just the scanned grid. The signed difference 2 v^T P b +
// v^T P v dominates the absolute one because P is positive definite.
// Throws Error on an empty box (lo > hi componentwise).
double quadratic_bound_constant(const Eigen::Matrix2d& P,
                                const Eigen::Vector2d& lo,
                                const Eigen::Vector2d& hi,
                                int anchors_per_axis = 41,
                                int directions = 512);

}  // namespace ddfl

#endif  // DDFL_ANALYSIS_HPP
