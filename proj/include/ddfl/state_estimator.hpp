#ifndef DDFL_STATE_ESTIMATOR_HPP
#define DDFL_STATE_ESTIMATOR_HPP

#include <Eigen/Dense>
#include <vector>

#include "ddfl/errors.hpp"

namespace ddfl {

// Hold period T carved into rho sub-samples, delta = T / rho apart. At least
// three samples per period are needed to reconstruct position, velocity and
// the held acceleration; larger rho averages measurement noise.
struct SamplingConfig {
  double T = 0.01;
  int rho = 3;

  double delta() const { return T / rho; }
  void validate() const;  // throws ConfigError unless T > 0 and rho >= 3
};

// Output samples taken under one held input, newest first: samples[j] is the
// measurement j sub-sample intervals before the window end.
struct SampleWindow {
  std::vector<double> samples;
};

struct StateEstimate {
  double z1_hat = 0;
  double z2_hat = 0;
  double z3_hat = 0;  // held acceleration over the window

  Eigen::Vector2d head() const { return Eigen::Vector2d(z1_hat, z2_hat); }
};

// One sub-sample transition of the 3-state chain (position, velocity, held
// acceleration): upper-triangular Taylor block.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> subsample_matrix(Scalar delta) {
  Eigen::Matrix<Scalar, 3, 3> A;
  A << Scalar(1), delta, delta * delta / Scalar(2),
       Scalar(0), Scalar(1), delta,
       Scalar(0), Scalar(0), Scalar(1);
  return A;
}

// Row j maps the chain state at the newest sample to the output j
// sub-samples earlier: [1, -j delta, (j delta)^2 / 2]. Columns are
// Vandermonde-like in j, so the matrix has full column rank for rho >= 3.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 3> observability_matrix(int rho,
                                                              Scalar delta) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 3> O(rho, 3);
  for (int j = 0; j < rho; ++j) {
    const Scalar tj = Scalar(j) * delta;
    O(j, 0) = Scalar(1);
    O(j, 1) = -tj;
    O(j, 2) = tj * tj / Scalar(2);
  }
  return O;
}

Eigen::Matrix3d build_subsample_matrix(const SamplingConfig& cfg);
Eigen::Matrix<double, Eigen::Dynamic, 3> build_observability_matrix(
    const SamplingConfig& cfg);

// Least-squares reconstruction of (z1, z2, z3) at the newest sample from one
// window. Exact (to rounding) on data generated by the chain itself; under
// measurement noise it returns the orthogonal projection. Throws
// EstimatorError on a wrong-size or non-finite window, or a rank-deficient
// factorization.
StateEstimate estimate_state(const SamplingConfig& cfg,
                             const SampleWindow& window);

// Same solve with the QR factorization computed once; read-only afterwards,
// safe to share across threads.
class StateEstimatorKernel {
 public:
  explicit StateEstimatorKernel(const SamplingConfig& cfg);

  StateEstimate solve(const SampleWindow& window) const;

  const Eigen::Matrix<double, Eigen::Dynamic, 3>& observability() const {
    return obs_;
  }

 private:
  int rho_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> obs_;
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, Eigen::Dynamic, 3>> qr_;
};

}  // namespace ddfl

#endif  // DDFL_STATE_ESTIMATOR_HPP
