#include "ddfl/run_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "ddfl/csv.hpp"
#include "ddfl/sha1.hpp"

namespace ddfl {

namespace {

const char* kFamilyKeys[] = {"c00", "c10", "c01", "c20", "c11",
                             "c02", "s1",  "w1",  "s2",  "w2"};

std::string join_g17(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += format_g17(v);
  }
  return out;
}

ParametricFn read_family(const KeyValueConfig& cfg, const std::string& stem) {
  ParametricFn fn;
  double* slots[] = {&fn.c00, &fn.c10, &fn.c01, &fn.c20, &fn.c11,
                     &fn.c02, &fn.s1,  &fn.w1,  &fn.s2,  &fn.w2};
  for (std::size_t i = 0; i < std::size(kFamilyKeys); ++i) {
    const std::string key = "plant." + stem + "_" + kFamilyKeys[i];
    if (cfg.has(key)) *slots[i] = cfg.get_double(key);
  }
  return fn;
}

void echo_family(KeyValueConfig& out, const std::string& stem,
                 const ParametricFn& fn) {
  const double values[] = {fn.c00, fn.c10, fn.c01, fn.c20, fn.c11,
                           fn.c02, fn.s1,  fn.w1,  fn.s2,  fn.w2};
  for (std::size_t i = 0; i < std::size(kFamilyKeys); ++i)
    out.set("plant." + stem + "_" + kFamilyKeys[i], format_g17(values[i]));
}

NoiseKind parse_noise_kind(const std::string& raw) {
  if (raw == "none") return NoiseKind::none;
  if (raw == "uniform") return NoiseKind::uniform;
  if (raw == "truncated-gaussian") return NoiseKind::truncated_gaussian;
  throw ConfigError(
      "config: run.noise must be none, uniform, or truncated-gaussian (got '" +
      raw + "')");
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::uniform:
      return "uniform";
    case NoiseKind::truncated_gaussian:
      return "truncated-gaussian";
  }
  return "none";
}

// Keys build_run understands beyond the defaults (optional overrides).
std::set<std::string> allowed_keys(bool custom_plant) {
  std::set<std::string> keys;
  for (const std::string& k : default_config().keys()) keys.insert(k);
  keys.insert("plant.beta_low");
  keys.insert("plant.beta_high");
  if (custom_plant) {
    for (const char* stem : {"alpha", "beta"})
      for (const char* suffix : kFamilyKeys)
        keys.insert(std::string("plant.") + stem + "_" + suffix);
  }
  return keys;
}

}  // namespace

KeyValueConfig default_config() {
  KeyValueConfig cfg;
  cfg.set("plant.name", "point-mass-1");

  cfg.set("sampling.T", "0.01");
  cfg.set("sampling.rho", "3");

  cfg.set("observer.gamma", "2");
  cfg.set("observer.gamma_low", "2");
  cfg.set("observer.gamma_high", "2");
  cfg.set("observer.lambda_pi", "1");
  cfg.set("observer.projection", "true");
  cfg.set("observer.beta_floor", "0.001");

  cfg.set("controller.pole1", "-1");
  cfg.set("controller.pole2", "-2");
  cfg.set("controller.q11", "1");
  cfg.set("controller.q12", "0");
  cfg.set("controller.q22", "1");

  cfg.set("run.z0_1", "1");
  cfg.set("run.z0_2", "0");
  cfg.set("run.u_star", "0");
  cfg.set("run.horizon", "2000");
  cfg.set("run.seed", "1");
  cfg.set("run.noise", "none");
  cfg.set("run.noise_amplitude", "0");
  cfg.set("run.rel_tol", "1e-10");
  cfg.set("run.abs_tol", "1e-12");
  cfg.set("run.guard_norm", "1e6");

  cfg.set("sweep.T_values", "0.2,0.1,0.05,0.02,0.01");

  cfg.set("order.T_values", "0.1,0.05,0.025,0.0125");
  cfg.set("order.z_lo", "-1");
  cfg.set("order.z_hi", "1");
  cfg.set("order.u_lo", "-2");
  cfg.set("order.u_hi", "2");
  cfg.set("order.grid_n", "5");

  cfg.set("estimator.T_values", "0.1,0.05,0.025,0.0125");
  return cfg;
}

ResolvedRun build_run(const KeyValueConfig& user) {
  // Overlay the user's keys on the defaults, then read everything from the
  // merged view so missing keys cannot exist downstream.
  KeyValueConfig cfg = default_config();
  for (const std::string& key : user.keys()) cfg.set(key, user.get_string(key));

  const std::string plant_name = cfg.get_string("plant.name");
  const bool custom = plant_name == "custom";
  const std::set<std::string> allowed = allowed_keys(custom);
  for (const std::string& key : cfg.keys())
    if (allowed.find(key) == allowed.end())
      throw ConfigError("config: unrecognized key '" + key + "'" +
                        (!custom && key.rfind("plant.", 0) == 0
                             ? " (parametric coefficients need plant.name = custom)"
                             : ""));

  ResolvedRun out;
  RunConfig& run = out.run;

  if (custom) {
    if (!cfg.has("plant.beta_low") || !cfg.has("plant.beta_high"))
      throw ConfigError(
          "config: a custom plant needs plant.beta_low and plant.beta_high");
    run.plant = make_parametric_plant(
        "custom", read_family(cfg, "alpha"), read_family(cfg, "beta"),
        {cfg.get_double("plant.beta_low"), cfg.get_double("plant.beta_high")});
  } else {
    run.plant = find_plant(plant_name);
    if (cfg.has("plant.beta_low"))
      run.plant.beta_bounds.first = cfg.get_double("plant.beta_low");
    if (cfg.has("plant.beta_high"))
      run.plant.beta_bounds.second = cfg.get_double("plant.beta_high");
    if (cfg.has("plant.beta_low") || cfg.has("plant.beta_high"))
      check_beta_bounds(run.plant, Eigen::Vector2d(-2, -2),
                        Eigen::Vector2d(2, 2));
  }

  run.sampling.T = cfg.get_double("sampling.T");
  run.sampling.rho = cfg.get_int("sampling.rho");
  run.sampling.validate();

  run.observer.gamma = cfg.get_double("observer.gamma");
  run.observer.gamma_low = cfg.get_double("observer.gamma_low");
  run.observer.gamma_high = cfg.get_double("observer.gamma_high");
  run.observer.lambda_pi = cfg.get_double("observer.lambda_pi");
  run.observer.beta_floor = cfg.get_double("observer.beta_floor");
  if (cfg.get_bool("observer.projection"))
    run.observer.projection = run.plant.beta_bounds;
  run.observer.validate();

  Eigen::Matrix2d Q;
  const double q12 = cfg.get_double("controller.q12");
  Q << cfg.get_double("controller.q11"), q12, q12,
      cfg.get_double("controller.q22");
  run.gains = design_gains(cfg.get_double("controller.pole1"),
                           cfg.get_double("controller.pole2"), Q);

  run.z0 = Eigen::Vector2d(cfg.get_double("run.z0_1"),
                           cfg.get_double("run.z0_2"));
  run.u_star = cfg.get_double("run.u_star");
  run.horizon_steps = cfg.get_int("run.horizon");
  run.seed = cfg.get_uint64("run.seed");
  run.noise.kind = parse_noise_kind(cfg.get_string("run.noise"));
  run.noise.amplitude = cfg.get_double("run.noise_amplitude");
  if (run.noise.kind != NoiseKind::none && !(run.noise.amplitude >= 0))
    throw ConfigError("config: run.noise_amplitude must be >= 0");
  run.rel_tol = cfg.get_double("run.rel_tol");
  run.abs_tol = cfg.get_double("run.abs_tol");
  if (!(run.rel_tol > 0) || !(run.abs_tol > 0))
    throw ConfigError("config: run.rel_tol and run.abs_tol must be positive");
  run.guard_norm = cfg.get_double("run.guard_norm");

  // Canonical echo: fixed key order, canonical number formatting, effective
  // values. Rebuilding from this echo reproduces it byte for byte.
  KeyValueConfig& res = out.resolved;
  res.set("plant.name", plant_name);
  res.set("plant.beta_low", format_g17(run.plant.beta_bounds.first));
  res.set("plant.beta_high", format_g17(run.plant.beta_bounds.second));
  if (custom) {
    echo_family(res, "alpha", read_family(cfg, "alpha"));
    echo_family(res, "beta", read_family(cfg, "beta"));
  }
  res.set("sampling.T", format_g17(run.sampling.T));
  res.set("sampling.rho", std::to_string(run.sampling.rho));
  res.set("observer.gamma", format_g17(run.observer.gamma));
  res.set("observer.gamma_low", format_g17(run.observer.gamma_low));
  res.set("observer.gamma_high", format_g17(run.observer.gamma_high));
  res.set("observer.lambda_pi", format_g17(run.observer.lambda_pi));
  res.set("observer.projection",
          run.observer.projection ? "true" : "false");
  res.set("observer.beta_floor", format_g17(run.observer.beta_floor));
  res.set("controller.pole1", format_g17(cfg.get_double("controller.pole1")));
  res.set("controller.pole2", format_g17(cfg.get_double("controller.pole2")));
  res.set("controller.q11", format_g17(Q(0, 0)));
  res.set("controller.q12", format_g17(Q(0, 1)));
  res.set("controller.q22", format_g17(Q(1, 1)));
  res.set("run.z0_1", format_g17(run.z0(0)));
  res.set("run.z0_2", format_g17(run.z0(1)));
  res.set("run.u_star", format_g17(run.u_star));
  res.set("run.horizon", std::to_string(run.horizon_steps));
  res.set("run.seed", std::to_string(run.seed));
  res.set("run.noise", noise_kind_name(run.noise.kind));
  res.set("run.noise_amplitude", format_g17(run.noise.amplitude));
  res.set("run.rel_tol", format_g17(run.rel_tol));
  res.set("run.abs_tol", format_g17(run.abs_tol));
  res.set("run.guard_norm", format_g17(run.guard_norm));
  res.set("sweep.T_values", join_g17(cfg.get_double_list("sweep.T_values")));
  res.set("order.T_values", join_g17(cfg.get_double_list("order.T_values")));
  res.set("order.z_lo", format_g17(cfg.get_double("order.z_lo")));
  res.set("order.z_hi", format_g17(cfg.get_double("order.z_hi")));
  res.set("order.u_lo", format_g17(cfg.get_double("order.u_lo")));
  res.set("order.u_hi", format_g17(cfg.get_double("order.u_hi")));
  res.set("order.grid_n", std::to_string(cfg.get_int("order.grid_n")));
  res.set("estimator.T_values",
          join_g17(cfg.get_double_list("estimator.T_values")));
  return out;
}

std::vector<double> sweep_T_values(const KeyValueConfig& resolved) {
  return resolved.get_double_list("sweep.T_values");
}

std::vector<double> estimator_T_values(const KeyValueConfig& resolved) {
  return resolved.get_double_list("estimator.T_values");
}

OrderSettings order_settings(const KeyValueConfig& resolved) {
  OrderSettings s;
  s.T_values = resolved.get_double_list("order.T_values");
  const double z_lo = resolved.get_double("order.z_lo");
  const double z_hi = resolved.get_double("order.z_hi");
  s.box.z_lo = Eigen::Vector2d(z_lo, z_lo);
  s.box.z_hi = Eigen::Vector2d(z_hi, z_hi);
  s.box.u_lo = resolved.get_double("order.u_lo");
  s.box.u_hi = resolved.get_double("order.u_hi");
  s.box.points_per_axis = resolved.get_int("order.grid_n");
  if (!(z_lo <= z_hi) || !(s.box.u_lo <= s.box.u_hi))
    throw ConfigError("config: order box is empty");
  return s;
}

std::string manifest_text(const KeyValueConfig& resolved) {
  const std::string body = resolved.serialize();
  return "# ddfl manifest\n# content-hash: " + git_blob_sha1(body) + "\n" +
         body;
}

void write_manifest(const std::string& path, const KeyValueConfig& resolved,
                    bool force) {
  if (!force && std::filesystem::exists(path))
    throw Error("manifest already exists: " + path +
                " (pass --force to overwrite)");
  write_file(path, manifest_text(resolved));
}

KeyValueConfig read_manifest(const std::string& path) {
  const std::string text = read_file(path);
  const std::string line1 = "# ddfl manifest\n";
  const std::string line2_prefix = "# content-hash: ";
  if (text.rfind(line1, 0) != 0)
    throw ConfigError("manifest '" + path + "': missing format header");
  const std::size_t hash_start = line1.size();
  if (text.compare(hash_start, line2_prefix.size(), line2_prefix) != 0)
    throw ConfigError("manifest '" + path + "': missing content hash");
  const std::size_t hash_end = text.find('\n', hash_start);
  if (hash_end == std::string::npos)
    throw ConfigError("manifest '" + path + "': truncated header");
  const std::string hash =
      text.substr(hash_start + line2_prefix.size(),
                  hash_end - hash_start - line2_prefix.size());
  const std::string body = text.substr(hash_end + 1);
  if (git_blob_sha1(body) != hash)
    throw ConfigError("manifest '" + path +
                      "': content hash mismatch (file was edited?)");
  return KeyValueConfig::parse_string(body);
}

std::string report_text(const AnalysisReport& rep, double T0,
                        bool T_within_T0) {
  std::string out;
  out += "status = " + rep.status + "\n";
  out += "converged = " + std::string(rep.converged ? "true" : "false") + "\n";
  out += "final_norm = " + format_g17(rep.final_norm) + "\n";
  out += "max_state_norm = " + format_g17(rep.max_state_norm) + "\n";
  out += "max_pihat_norm = " + format_g17(rep.max_pihat_norm) + "\n";
  out += "lyapunov_violations = " + std::to_string(rep.lyapunov_violations) +
         "\n";
  out += "phi_e_pi_tail = " + format_g17(rep.phi_e_pi_tail) + "\n";
  out += "realized_N = " + format_g17(rep.realized_N) + "\n";
  out += "admissible_T0 = " + format_g17(T0) + "\n";
  out += "T_within_T0 = " + std::string(T_within_T0 ? "true" : "false") + "\n";
  out += "escape_step = " + std::to_string(rep.escape_step) + "\n";
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace ddfl
