#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "ddfl/analysis.hpp"
#include "ddfl/closed_loop.hpp"
#include "ddfl/csv.hpp"
#include "ddfl/run_io.hpp"
#include "ddfl/sha1.hpp"

namespace {

std::string scratch_dir() {
  const auto dir =
      std::filesystem::temp_directory_path() / "ddfl_test_io_scratch";
  std::filesystem::remove_all(dir);
  ddfl::ensure_dir(dir.string());
  return dir.string();
}

ddfl::TrajectoryLog short_run(int horizon, bool noisy) {
  ddfl::RunConfig cfg;
  cfg.plant = ddfl::find_plant("stiff-gain-1");
  cfg.sampling = {0.01, 3};
  cfg.observer.gamma = 2;
  cfg.observer.gamma_low = 2;
  cfg.observer.gamma_high = 2;
  cfg.observer.lambda_pi = 1;
  cfg.observer.projection = cfg.plant.beta_bounds;
  cfg.gains = ddfl::design_gains(-1, -2);
  cfg.z0 = Eigen::Vector2d(0.8, -0.2);
  cfg.horizon_steps = horizon;
  if (noisy) {
    cfg.noise = {ddfl::NoiseKind::uniform, 1e-3};
    cfg.seed = 13;
  }
  return ddfl::run(cfg);
}

}  // namespace

TEST_CASE("digest matches the published vectors") {
  CHECK(ddfl::sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(ddfl::sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(ddfl::sha1_hex(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "84983e441c3bd26ebaae4aa1f95129e5e54670f1");
  CHECK(ddfl::sha1_hex(std::string(1000000, 'a')) ==
        "34aa973cd4c4daa4f61eeb2bdbad27316534016f");
  // Same convention as `git hash-object` on a file containing "hello\n".
  CHECK(ddfl::git_blob_sha1("hello\n") ==
        "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("seventeen significant digits round-trip exactly") {
  for (const double x : {M_PI, 0.1, 1e308, 5e-324, 1.0 / 3.0, -2.5e-7}) {
    const std::string s = ddfl::format_g17(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(ddfl::format_g17(0.1) == "0.10000000000000001");
  CHECK(ddfl::format_g17(0.125) == "0.125");  // exact binary: no digit noise
  CHECK(ddfl::format_g17(std::nan("")) == "nan");
  const std::string neg_zero = ddfl::format_g17(-0.0);
  CHECK(std::signbit(std::strtod(neg_zero.c_str(), nullptr)));
}

TEST_CASE("trajectory serialization is a byte fixpoint") {
  const ddfl::TrajectoryLog log = short_run(60, true);
  const std::string text = ddfl::trajectory_csv(log);
  const ddfl::TrajectoryLog parsed = ddfl::parse_trajectory_csv(text);

  CHECK(parsed.steps.size() == log.steps.size());
  REQUIRE(parsed.has_terminal);
  CHECK(parsed.terminal.k == log.terminal.k);
  CHECK(parsed.realized_N == log.realized_N);
  CHECK_FALSE(parsed.failed);
  CHECK((parsed.final_state - log.final_state).norm() == 0.0);
  const auto& a = log.steps[17];
  const auto& b = parsed.steps[17];
  CHECK(a.z(0) == b.z(0));
  CHECK(a.zhat.z3_hat == b.zhat.z3_hat);
  CHECK(a.pihat.beta_hat == b.pihat.beta_hat);
  CHECK(a.u == b.u);
  CHECK(a.V == b.V);
  CHECK(a.W == b.W);

  CHECK(ddfl::trajectory_csv(parsed) == text);
}

TEST_CASE("a truncated trajectory parses back as a failure") {
  ddfl::RunConfig cfg;
  ddfl::PlantModel violent;
  violent.alpha_fn = [](const Eigen::Vector2d& z) {
    return 10.0 * (1.0 + z(1) * z(1));
  };
  violent.beta_fn = [](const Eigen::Vector2d&) { return 1.0; };
  violent.beta_bounds = {0.9, 1.1};
  violent.name = "blowup";
  cfg.plant = violent;
  cfg.sampling = {0.5, 3};
  cfg.observer.projection = violent.beta_bounds;
  cfg.gains = ddfl::design_gains(-1, -2);
  cfg.z0 = Eigen::Vector2d(0, 1);
  cfg.horizon_steps = 20;
  const ddfl::TrajectoryLog log = ddfl::run(cfg);
  REQUIRE(log.failed);

  const std::string text = ddfl::trajectory_csv(log);
  const ddfl::TrajectoryLog parsed = ddfl::parse_trajectory_csv(text);
  CHECK(parsed.failed);
  CHECK_FALSE(parsed.has_terminal);
  CHECK(parsed.escape_step == log.escape_step);
  CHECK(ddfl::trajectory_csv(parsed) == text);
}

TEST_CASE("malformed trajectory text is rejected") {
  CHECK_THROWS_AS(ddfl::parse_trajectory_csv("k,t,wrong header\n1,2,3\n"),
                  ddfl::Error);
  CHECK_THROWS_AS(ddfl::parse_trajectory_csv(""), ddfl::Error);
}

TEST_CASE("sub-sample serialization has the documented shape") {
  const ddfl::TrajectoryLog log = short_run(10, false);
  const std::string text = ddfl::subsamples_csv(log);
  CHECK(text.rfind("l,t,y,d\n", 0) == 0);
  CHECK(text.find("\n0,0,") != std::string::npos);
  // Noise-free: every noise column entry is exactly 0.
  std::size_t rows = 0;
  for (std::size_t pos = text.find('\n'); pos != std::string::npos;
       pos = text.find('\n', pos + 1))
    ++rows;
  CHECK(rows == log.subsamples.size() + 1);  // header + data, trailing \n
}

TEST_CASE("manifests verify their content hash") {
  const std::string dir = scratch_dir();
  const std::string path = dir + "/manifest.txt";
  const ddfl::ResolvedRun rr = ddfl::build_run(ddfl::default_config());

  ddfl::write_manifest(path, rr.resolved, false);
  const ddfl::KeyValueConfig back = ddfl::read_manifest(path);
  CHECK(back == rr.resolved);

  // Flip one byte of the body: the hash line no longer matches.
  std::string text = ddfl::read_file(path);
  const std::size_t body = text.find("[plant]");
  REQUIRE(body != std::string::npos);
  text[body + 1] = 'q';
  ddfl::write_file(path, text);
  CHECK_THROWS_AS(ddfl::read_manifest(path), ddfl::Error);

  // Refuse a silent overwrite, allow a forced one.
  ddfl::write_file(path, "leftover");
  CHECK_THROWS_AS(ddfl::write_manifest(path, rr.resolved, false), ddfl::Error);
  CHECK_NOTHROW(ddfl::write_manifest(path, rr.resolved, true));
  CHECK(ddfl::read_manifest(path) == rr.resolved);

  CHECK_THROWS_AS(ddfl::read_manifest(dir + "/missing.txt"), ddfl::Error);
}

TEST_CASE("report text carries the verdict fields") {
  const ddfl::TrajectoryLog log = short_run(200, false);
  const ddfl::AnalysisReport rep = ddfl::analyze(log, 0.0);
  const std::string text = ddfl::report_text(rep, 0.125, true);
  CHECK(text.find("status = ") != std::string::npos);
  CHECK(text.find("final_norm = ") != std::string::npos);
  CHECK(text.find("phi_e_pi_tail = ") != std::string::npos);
  CHECK(text.find("admissible_T0 = 0.125") != std::string::npos);
  CHECK(text.find("T_within_T0 = true") != std::string::npos);
  CHECK(text.find("lyapunov_violations = ") != std::string::npos);
}

TEST_CASE("file helpers round-trip bytes") {
  const std::string dir = scratch_dir();
  const std::string path = dir + "/blob.bin";
  const std::string payload = "line one\nline two\n\x01\x02 tail";
  ddfl::write_file(path, payload);
  CHECK(ddfl::read_file(path) == payload);
  CHECK_THROWS_AS(ddfl::read_file(dir + "/does-not-exist"), ddfl::Error);
}
