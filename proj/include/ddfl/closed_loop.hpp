#ifndef DDFL_CLOSED_LOOP_HPP
#define DDFL_CLOSED_LOOP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ddfl/controller.hpp"
#include "ddfl/errors.hpp"
#include "ddfl/param_observer.hpp"
#include "ddfl/plant.hpp"
#include "ddfl/state_estimator.hpp"

namespace ddfl {

enum class NoiseKind { none, uniform, truncated_gaussian };

// Measurement noise d added to each output sample; |d| <= amplitude always.
// uniform draws from [-amplitude, amplitude); truncated_gaussian rejects
// Box-Muller draws (sigma = amplitude / 3) until one lands inside.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double amplitude = 0.0;
};

// Deterministic sampler: uniforms come straight off a mersenne stream as
// (x >> 11) * 2^-53, so identical seeds reproduce logs bit for bit across
// standard libraries.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseSpec& spec, std::uint64_t seed);

  double draw();

 private:
  double uniform01();

  NoiseSpec spec_;
  std::mt19937_64 eng_;
};

struct RunConfig {
  PlantModel plant;
  SamplingConfig sampling;
  ObserverConfig observer;
  ControllerGains gains;
  Eigen::Vector2d z0{0.0, 0.0};
  double u_star = 0.0;     // input held for the two startup steps
  int horizon_steps = 2000;
  NoiseSpec noise;
  std::uint64_t seed = 1;
  double rel_tol = 1e-10;  // reference-flow tolerances
  double abs_tol = 1e-12;
  double guard_norm = 1e6;

  // Optional per-step observer gain; must stay within
  // [observer.gamma_low, observer.gamma_high].
  std::function<double(int)> gamma_schedule;
};

struct SubSampleRecord {
  long l;      // sub-sample index, 0 at t = 0
  double t;
  double y;    // z1 + d
  double d;
};

// One hold period: the state at the step start, the estimates available when
// the input was chosen, and the input held for the period. Estimates exist
// from k = 1 on; before that the fields are NaN and zhat_valid is false.
struct StepRecord {
  int k = 0;
  double t = 0;
  Eigen::Vector2d z{0, 0};
  StateEstimate zhat;
  bool zhat_valid = false;
  double alpha_true = 0;   // alpha / beta evaluated at z
  double beta_true = 0;
  ParamEstimate pihat;
  double e_z1 = 0, e_z2 = 0;          // z - zhat
  double e_alpha = 0, e_beta = 0;     // (alpha_true, beta_true) - pihat
  double phi_e_pi = 0;                // e_alpha + u * e_beta
  double u = 0;
  double V = 0;  // z^T P z
  double W = 0;  // e_alpha^2 + e_beta^2
};

struct TrajectoryLog {
  std::vector<SubSampleRecord> subsamples;  // 1 + rho * steps on success
  std::vector<StepRecord> steps;

  // Set when the true state left the guard ball (or escaped in finite time)
  // during hold period escape_step. Divergence is recorded, not thrown.
  bool failed = false;
  int escape_step = -1;

  // Completed runs carry a terminal record at k = horizon: the state after
  // the last hold period and the estimates refreshed once more from the
  // final window (u and phi_e_pi are NaN, no further input was chosen).
  StepRecord terminal;
  bool has_terminal = false;

  // True state when the run stopped; equals terminal.z on success.
  Eigen::Vector2d final_state{0, 0};

  double T = 0;
  int rho = 0;
  double realized_N = 1;  // max over steps of 1 + u(k)^2
};

// Runs the sampled-data loop: outputs are sampled every delta = T / rho, the
// state estimate comes from the newest window, and the parameter observer and
// certainty-equivalence input kick in at k = 2 after two startup steps under
// u_star. Sub-samples at hold boundaries are taken before the input
// switches. Throws ConfigError on invalid configuration; estimator /
// observer / controller faults propagate with the step index appended.
TrajectoryLog run(const RunConfig& cfg);

struct SweepRow {
  double T = 0;
  std::string status;      // "converged", "bounded", or "failed"
  double final_norm = 0;
  double max_pihat_norm = 0;
  double realized_N = 1;
  double T0 = 0;           // admissible hold period at the realized N
  bool T_within_T0 = false;
};

// Re-runs the same configuration across hold periods. Failures land in the
// status column; nothing throws for a diverging run. jobs > 1 distributes
// runs across threads; results are ordered by T_values regardless.
std::vector<SweepRow> sweep_T(const RunConfig& cfg,
                              const std::vector<double>& T_values,
                              int jobs = 1);

}  // namespace ddfl

#endif  // DDFL_CLOSED_LOOP_HPP
