#ifndef DDFL_CSV_HPP
#define DDFL_CSV_HPP

#include <string>
#include <vector>

#include "ddfl/analysis.hpp"
#include "ddfl/approx_model.hpp"
#include "ddfl/closed_loop.hpp"

namespace ddfl {

// Doubles are written with "%.17g": 17 significant digits round-trip every
// finite double exactly, and the fixed format keeps identical runs
// byte-identical. NaN renders as "nan".
std::string format_g17(double x);

// One row per hold period k plus a terminal row at k = horizon carrying the
// final state and estimates (u and phi_e_pi are NaN there). Columns:
// k,t,z1,z2,z1_hat,z2_hat,z3_hat,alpha_true,beta_true,alpha_hat,beta_hat,
// e_z1,e_z2,e_alpha,e_beta,phi_e_pi,u,V,W
std::string trajectory_csv(const TrajectoryLog& log);

// Columns: l,t,y,d
std::string subsamples_csv(const TrajectoryLog& log);

// Columns: T,err_z1,err_z2
std::string order_csv(const std::vector<OrderSweepRow>& rows);

// Columns: T,err_z1,err_z2,err_z3
std::string estimator_csv(const std::vector<EstimatorSweepRow>& rows);

// Columns: T,status,final_norm,max_pihat_norm,realized_N,T0,T_within_T0
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Inverse of trajectory_csv: rebuilds step records and the terminal-row
// fields. T and rho are not stored in the CSV; callers restore them from the
// manifest. Throws Error on a malformed header or row.
TrajectoryLog parse_trajectory_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);  // throws Error if unreadable

}  // namespace ddfl

#endif  // DDFL_CSV_HPP
