#include "ddfl/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ddfl/analysis.hpp"

namespace ddfl {

NoiseSampler::NoiseSampler(const NoiseSpec& spec, std::uint64_t seed)
    : spec_(spec), eng_(seed) {
  if (spec.kind != NoiseKind::none && !(spec.amplitude >= 0))
    throw ConfigError("noise: amplitude must be >= 0");
}

double NoiseSampler::uniform01() {
  // 53 random mantissa bits; avoids distribution implementations that vary
  // across standard libraries.
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double NoiseSampler::draw() {
  switch (spec_.kind) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::uniform:
      return spec_.amplitude * (2.0 * uniform01() - 1.0);
    case NoiseKind::truncated_gaussian: {
      if (spec_.amplitude == 0) return 0.0;
      const double sigma = spec_.amplitude / 3.0;
      for (;;) {
        double u1 = uniform01();
        const double u2 = uniform01();
        if (u1 == 0.0) u1 = 0x1.0p-53;
        const double d = sigma * std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * M_PI * u2);
        if (std::abs(d) <= spec_.amplitude) return d;
      }
    }
  }
  return 0.0;
}

namespace {

double step_gain(const RunConfig& cfg, int k) {
  return cfg.gamma_schedule ? cfg.gamma_schedule(k) : cfg.observer.gamma;
}

// With projection on, beta_hat can never leave the bound interval, so the
// fault floor only needs to catch genuinely broken states.
double effective_beta_floor(const ObserverConfig& obs) {
  return obs.projection ? std::min(obs.beta_floor, obs.projection->first)
                        : obs.beta_floor;
}

StepRecord make_record(int k, double t, const Eigen::Vector2d& z,
                       const PlantModel& plant, const StateEstimate& zhat,
                       bool zhat_valid, const ParamEstimate& pihat, double u,
                       const Eigen::Matrix2d& P) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  StepRecord rec;
  rec.k = k;
  rec.t = t;
  rec.z = z;
  rec.zhat = zhat_valid ? zhat : StateEstimate{nan, nan, nan};
  rec.zhat_valid = zhat_valid;
  rec.alpha_true = plant.alpha(z);
  rec.beta_true = plant.beta(z);
  rec.pihat = pihat;
  rec.e_z1 = zhat_valid ? z(0) - zhat.z1_hat : nan;
  rec.e_z2 = zhat_valid ? z(1) - zhat.z2_hat : nan;
  rec.e_alpha = rec.alpha_true - pihat.alpha_hat;
  rec.e_beta = rec.beta_true - pihat.beta_hat;
  rec.phi_e_pi = std::isnan(u) ? nan : rec.e_alpha + u * rec.e_beta;
  rec.u = u;
  rec.V = z.dot(P * z);
  rec.W = rec.e_alpha * rec.e_alpha + rec.e_beta * rec.e_beta;
  return rec;
}

}  // namespace

TrajectoryLog run(const RunConfig& cfg) {
  cfg.sampling.validate();
  cfg.observer.validate();
  if (cfg.horizon_steps < 3)
    throw ConfigError("run: horizon must be at least 3 hold periods");
  if (!cfg.z0.allFinite()) throw ConfigError("run: z0 must be finite");
  if (!std::isfinite(cfg.u_star))
    throw ConfigError("run: u_star must be finite");
  if (!(cfg.guard_norm > 0)) throw ConfigError("run: guard_norm must be > 0");

  const double T = cfg.sampling.T;
  const int rho = cfg.sampling.rho;
  const double delta = cfg.sampling.delta();
  const double beta_floor = effective_beta_floor(cfg.observer);

  const ExactFlowOracle oracle{cfg.plant, cfg.rel_tol, cfg.abs_tol,
                               cfg.guard_norm};
  const StateEstimatorKernel kernel(cfg.sampling);
  NoiseSampler noise(cfg.noise, cfg.seed);

  TrajectoryLog log;
  log.T = T;
  log.rho = rho;
  log.subsamples.reserve(1 +
                         static_cast<std::size_t>(rho) * cfg.horizon_steps);
  log.steps.reserve(cfg.horizon_steps);

  Eigen::Vector2d z = cfg.z0;
  ParamEstimate pihat = initial_estimate(cfg.plant.beta_bounds);
  StateEstimate zhat_prev, zhat_curr;
  bool have_curr = false;  // zhat_curr estimates z(kT) once true
  std::vector<double> u_hist;
  u_hist.reserve(cfg.horizon_steps);

  auto record_sample = [&](long l) {
    const double d = noise.draw();
    log.subsamples.push_back({l, l * delta, z(0) + d, d});
  };
  record_sample(0);

  for (int k = 0; k < cfg.horizon_steps; ++k) {
    // Choose the input for hold period k. The first two periods run open
    // loop so that two estimates exist before the observer starts.
    double u;
    if (k <= 1) {
      u = cfg.u_star;
    } else {
      try {
        pihat = observer_step_with_gain(cfg.observer, pihat, u_hist[k - 1],
                                        zhat_curr.z2_hat, zhat_prev.z2_hat, T,
                                        step_gain(cfg, k));
        u = control_law(cfg.gains, pihat, zhat_curr, beta_floor);
      } catch (const ObserverError& e) {
        throw ObserverError(std::string(e.what()) + " (step " +
                            std::to_string(k) + ")");
      } catch (const ControllerFaultError& e) {
        throw ControllerFaultError(std::string(e.what()) + " (step " +
                                   std::to_string(k) + ")");
      }
    }
    u_hist.push_back(u);
    log.realized_N = std::max(log.realized_N, 1 + u * u);
    log.steps.push_back(make_record(k, k * T, z, cfg.plant, zhat_curr,
                                    have_curr, pihat, u, cfg.gains.P));

    // Advance one hold period, sampling the output every delta. Boundary
    // samples are taken before the next input switch. Divergence is data:
    // the log is marked failed instead of throwing.
    for (int j = 1; j <= rho; ++j) {
      bool escaped = false;
      try {
        z = exact_flow(oracle, z, u, delta);
      } catch (const FiniteEscapeError&) {
        escaped = true;
      }
      if (!escaped && (!z.allFinite() || z.norm() > cfg.guard_norm))
        escaped = true;
      if (escaped) {
        log.failed = true;
        log.escape_step = k;
        break;
      }
      record_sample(static_cast<long>(k) * rho + j);
    }
    if (log.failed) break;

    // Estimate z((k+1) T) from the newest window; everything in it was
    // sampled under u(k).
    SampleWindow window;
    window.samples.resize(rho);
    const std::size_t end = log.subsamples.size();
    for (int j = 0; j < rho; ++j)
      window.samples[j] = log.subsamples[end - 1 - j].y;
    zhat_prev = zhat_curr;
    zhat_curr = kernel.solve(window);
    have_curr = true;
  }

  log.final_state = z;
  if (!log.failed) {
    // One more observer update so the terminal record reflects the final
    // window; it uses only data already gathered.
    const int K = cfg.horizon_steps;
    pihat = observer_step_with_gain(cfg.observer, pihat, u_hist[K - 1],
                                    zhat_curr.z2_hat, zhat_prev.z2_hat, T,
                                    step_gain(cfg, K));
    log.terminal =
        make_record(K, K * T, z, cfg.plant, zhat_curr, true, pihat,
                    std::numeric_limits<double>::quiet_NaN(), cfg.gains.P);
    log.has_terminal = true;
  }
  return log;
}

std::vector<SweepRow> sweep_T(const RunConfig& cfg,
                              const std::vector<double>& T_values, int jobs) {
  if (jobs < 1) throw ConfigError("sweep_T: jobs must be >= 1");
  std::vector<SweepRow> rows(T_values.size());
  if (T_values.empty()) return rows;

  auto run_one = [&cfg](double T) {
    SweepRow row;
    row.T = T;
    try {
      RunConfig local = cfg;
      local.sampling.T = T;
      const TrajectoryLog log = run(local);
      const AnalysisReport rep = analyze(log, cfg.noise.amplitude);
      row.status = rep.status;
      row.final_norm = rep.final_norm;
      row.max_pihat_norm = rep.max_pihat_norm;
      row.realized_N = rep.realized_N;
      row.T0 = admissible_T0(cfg.observer, rep.realized_N);
      row.T_within_T0 = T <= row.T0;
    } catch (const Error&) {
      // A sweep classifies; it never aborts on one bad cell.
      row.status = "failed";
      row.final_norm = std::numeric_limits<double>::quiet_NaN();
      row.max_pihat_norm = std::numeric_limits<double>::quiet_NaN();
      row.realized_N = std::numeric_limits<double>::quiet_NaN();
      row.T0 = std::numeric_limits<double>::quiet_NaN();
      row.T_within_T0 = false;
    }
    return row;
  };

  const int workers =
      std::min<int>(jobs, static_cast<int>(T_values.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < T_values.size(); ++i)
      rows[i] = run_one(T_values[i]);
    return rows;
  }

  // Static striping: each worker owns indices i with i % workers == id, so
  // the row order (and therefore every byte of sweep output) is independent
  // of scheduling.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int id = 0; id < workers; ++id) {
    pool.emplace_back([&, id]() {
      for (std::size_t i = id; i < T_values.size(); i += workers)
        rows[i] = run_one(T_values[i]);
    });
  }
  for (std::thread& th : pool) th.join();
  return rows;
}

}  // namespace ddfl
