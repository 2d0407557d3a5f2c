#include "mnclust/linalg.hpp"

#include <cmath>
#include <numbers>

namespace mnclust {

SpdMatrix::SpdMatrix(Mat m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SpdMatrix: matrix is not square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0)) {
    throw NotSymmetric("SpdMatrix: asymmetry exceeds 1e-12 relative");
  }
  m_ = 0.5 * (m + m.transpose());
}

CholeskyFactor CholeskyFactor::compute(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("cholesky: matrix is not square");
  }
  const Mat sym = 0.5 * (m + m.transpose());
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  Mat lower = llt.matrixL();
  if ((lower.diagonal().array() <= 0.0).any()) {
    throw NotPositiveDefinite("cholesky: nonpositive pivot");
  }
  return CholeskyFactor(std::move(lower));
}

double CholeskyFactor::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

double CholeskyFactor::log_det_2pi_inv() const {
  return dim() * std::log(2.0 * std::numbers::pi) - log_det();
}

Vec CholeskyFactor::solve(const Vec& b) const {
  if (b.size() != dim()) {
    throw DimensionMismatch("solve: vector length does not match dimension");
  }
  Vec y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Mat CholeskyFactor::solve_matrix(const Mat& b) const {
  if (b.rows() != dim()) {
    throw DimensionMismatch("solve: row count does not match dimension");
  }
  Mat y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double CholeskyFactor::quad_form(const Vec& u, const Vec& v) const {
  if (u.size() != dim() || v.size() != dim()) {
    throw DimensionMismatch("quad_form: vector length does not match");
  }
  Vec wu = lower_.triangularView<Eigen::Lower>().solve(u);
  if (&u == &v) return wu.squaredNorm();
  Vec wv = lower_.triangularView<Eigen::Lower>().solve(v);
  return wu.dot(wv);
}

Mat CholeskyFactor::inverse() const {
  Mat inv = solve_matrix(Mat::Identity(dim(), dim()));
  return 0.5 * (inv + inv.transpose());
}

Vec sample_mvn(const Vec& mean, const CholeskyFactor& cov_chol,
               RandomStream& rng) {
  if (mean.size() != cov_chol.dim()) {
    throw DimensionMismatch("sample_mvn: mean length does not match");
  }
  Vec z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov_chol.lower() * z;
}

Vec sample_mvn(const Vec& mean, const SpdMatrix& cov, RandomStream& rng) {
  return sample_mvn(mean, cholesky(cov), rng);
}

}  // namespace mnclust
