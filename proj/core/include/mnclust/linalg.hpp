#pragma once

#include <Eigen/Dense>

#include "mnclust/errors.hpp"
#include "mnclust/rng.hpp"

namespace mnclust {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Symmetric positive-definite matrix. Symmetry is checked on construction
/// (1e-12 relative) and the stored entries are symmetrized as (M + M^T)/2 to
/// absorb file round-trip noise. Positive definiteness is established lazily,
/// by the first Cholesky factorization.
class SpdMatrix {
 public:
  explicit SpdMatrix(Mat m);

  static SpdMatrix identity(int p) { return SpdMatrix(Mat::Identity(p, p)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

/// Lower-triangular Cholesky factor L of an SPD matrix M = L L^T. All inverse
/// applications in the library go through triangular solves on L; explicit
/// matrix inverses appear only in test oracles.
class CholeskyFactor {
 public:
  /// Factor a symmetric matrix; throws NotPositiveDefinite if a pivot <= 0.
  /// The input is symmetrized before factorization.
  static CholeskyFactor compute(const Mat& m);

  int dim() const { return static_cast<int>(lower_.rows()); }
  const Mat& lower() const { return lower_; }

  /// log|M|
  double log_det() const;

  /// log|2 pi M^{-1}| = p log(2 pi) - log|M|
  double log_det_2pi_inv() const;

  /// x with M x = b.
  Vec solve(const Vec& b) const;
  Mat solve_matrix(const Mat& b) const;

  /// u^T M^{-1} v.
  double quad_form(const Vec& u, const Vec& v) const;

  /// M^{-1}, symmetrized. Used once per item at load time.
  Mat inverse() const;

 private:
  explicit CholeskyFactor(Mat lower) : lower_(std::move(lower)) {}
  Mat lower_;
};

inline CholeskyFactor cholesky(const SpdMatrix& m) {
  return CholeskyFactor::compute(m.matrix());
}

/// mean + L z with z standard normal; deterministic given the stream.
Vec sample_mvn(const Vec& mean, const CholeskyFactor& cov_chol,
               RandomStream& rng);
Vec sample_mvn(const Vec& mean, const SpdMatrix& cov, RandomStream& rng);

}  // namespace mnclust
