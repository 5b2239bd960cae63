#include "ddfl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace ddfl {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

constexpr const char* kTrajectoryHeader =
    "k,t,z1,z2,z1_hat,z2_hat,z3_hat,alpha_true,beta_true,alpha_hat,beta_hat,"
    "e_z1,e_z2,e_alpha,e_beta,phi_e_pi,u,V,W";

void append_step_row(std::string& out, const StepRecord& s) {
  out += std::to_string(s.k);
  for (double v : {s.t, s.z(0), s.z(1), s.zhat.z1_hat, s.zhat.z2_hat,
                   s.zhat.z3_hat, s.alpha_true, s.beta_true,
                   s.pihat.alpha_hat, s.pihat.beta_hat, s.e_z1, s.e_z2,
                   s.e_alpha, s.e_beta, s.phi_e_pi, s.u, s.V, s.W}) {
    out += ',';
    out += format_g17(v);
  }
  out += '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& field) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw Error("csv: malformed number '" + field + "'");
  return v;
}

}  // namespace

std::string trajectory_csv(const TrajectoryLog& log) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const StepRecord& s : log.steps) append_step_row(out, s);
  if (log.has_terminal) append_step_row(out, log.terminal);
  return out;
}

std::string subsamples_csv(const TrajectoryLog& log) {
  std::string out = "l,t,y,d\n";
  for (const SubSampleRecord& s : log.subsamples) {
    out += std::to_string(s.l);
    for (double v : {s.t, s.y, s.d}) {
      out += ',';
      out += format_g17(v);
    }
    out += '\n';
  }
  return out;
}

std::string order_csv(const std::vector<OrderSweepRow>& rows) {
  std::string out = "T,err_z1,err_z2\n";
  for (const OrderSweepRow& r : rows) {
    out += format_g17(r.T);
    out += ',';
    out += format_g17(r.err_z1);
    out += ',';
    out += format_g17(r.err_z2);
    out += '\n';
  }
  return out;
}

std::string estimator_csv(const std::vector<EstimatorSweepRow>& rows) {
  std::string out = "T,err_z1,err_z2,err_z3\n";
  for (const EstimatorSweepRow& r : rows) {
    out += format_g17(r.T);
    for (double v : {r.err_z1, r.err_z2, r.err_z3}) {
      out += ',';
      out += format_g17(v);
    }
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "T,status,final_norm,max_pihat_norm,realized_N,T0,T_within_T0\n";
  for (const SweepRow& r : rows) {
    out += format_g17(r.T);
    out += ',';
    out += r.status;
    for (double v : {r.final_norm, r.max_pihat_norm, r.realized_N, r.T0}) {
      out += ',';
      out += format_g17(v);
    }
    out += ',';
    out += r.T_within_T0 ? "true" : "false";
    out += '\n';
  }
  return out;
}

TrajectoryLog parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw Error("csv: unexpected trajectory header");

  TrajectoryLog log;
  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 19)
      throw Error("csv: trajectory row has " + std::to_string(f.size()) +
                  " fields, expected 19");
    StepRecord s;
    s.k = static_cast<int>(parse_double(f[0]));
    s.t = parse_double(f[1]);
    s.z = Eigen::Vector2d(parse_double(f[2]), parse_double(f[3]));
    s.zhat = StateEstimate{parse_double(f[4]), parse_double(f[5]),
                           parse_double(f[6])};
    s.zhat_valid = std::isfinite(s.zhat.z1_hat);
    s.alpha_true = parse_double(f[7]);
    s.beta_true = parse_double(f[8]);
    s.pihat = ParamEstimate{parse_double(f[9]), parse_double(f[10])};
    s.e_z1 = parse_double(f[11]);
    s.e_z2 = parse_double(f[12]);
    s.e_alpha = parse_double(f[13]);
    s.e_beta = parse_double(f[14]);
    s.phi_e_pi = parse_double(f[15]);
    s.u = parse_double(f[16]);
    s.V = parse_double(f[17]);
    s.W = parse_double(f[18]);
    records.push_back(s);
  }
  if (records.empty()) throw Error("csv: trajectory has no rows");

  // A terminal record (NaN input) closes a completed run.
  if (records.size() >= 2 && std::isnan(records.back().u)) {
    log.terminal = records.back();
    log.has_terminal = true;
    records.pop_back();
    log.final_state = log.terminal.z;
  } else {
    log.failed = true;
    log.escape_step = records.back().k;
    log.final_state = records.back().z;
  }
  log.steps = std::move(records);
  for (const StepRecord& s : log.steps)
    if (std::isfinite(s.u))
      log.realized_N = std::max(log.realized_N, 1 + s.u * s.u);
  return log;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ddfl
