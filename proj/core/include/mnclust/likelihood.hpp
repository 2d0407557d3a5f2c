#pragma once

#include <vector>

#include "mnclust/model.hpp"

namespace mnclust {

/// Prior over cluster means. Flat is a distinct mode, not a large-variance
/// limit of Normal: the two differ by a per-cluster normalization that does
/// not vanish as the prior widens.
class PriorSpec {
 public:
  enum class Kind { Flat, Normal };

  static PriorSpec flat() { return PriorSpec(); }
  static PriorSpec normal(const SpdMatrix& prior_precision);
  /// Gamma_0 = I / sigma2.
  static PriorSpec isotropic_normal(int dim, double sigma2);

  Kind kind() const { return kind_; }
  bool is_normal() const { return kind_ == Kind::Normal; }
  /// Gamma_0; only valid for Normal.
  const Mat& prior_precision() const { return prior_precision_; }
  /// log|2 pi Gamma_0^{-1}|; only valid for Normal.
  double log_det_2pi_prior_cov() const { return log_det_2pi_prior_cov_; }
  int dim() const { return static_cast<int>(prior_precision_.rows()); }

 private:
  PriorSpec() = default;
  Kind kind_ = Kind::Flat;
  Mat prior_precision_;
  double log_det_2pi_prior_cov_ = 0.0;
};

/// The partition log-likelihood split into its five terms, up to the
/// partition-independent normalization constant (deliberately dropped; only
/// differences between partitions are meaningful).
struct LikelihoodBreakdown {
  double data_term = 0.0;        // -1/2 sum_i log|2 pi Gamma_i^{-1}|
  double prior_norm_term = 0.0;  // -(m/2) log|2 pi Gamma_0^{-1}|, 0 for Flat
  double complexity_term = 0.0;  // +1/2 sum_g log|2 pi (Gamma_0 + sum Gamma)^{-1}|
  double fit_term = 0.0;         // -1/4 sum_g pairwise weighted sum of squares
  double shrink_term = 0.0;      // -1/2 sum_g sum_i x^T Gamma_i (.)^{-1} Gamma_0 x, 0 for Flat
  double total = 0.0;
};

/// Quadratic-form evaluation of the per-cluster fit sum:
///   sum_i x_i^T Gamma_i x_i - (sum Gamma x)^T (Gamma_0 + sum Gamma)^{-1} (sum Gamma x)
/// with Gamma_0 = 0 for Flat. O(1) in the cluster size given the stats.
double cluster_fit_quadform(const ClusterStats& stats, const PriorSpec& prior);

/// O(n_g^2) pairwise evaluation of the same fit sum. With
/// A_ij = Gamma_i (Gamma_0 + sum Gamma)^{-1} Gamma_j, d = x_i - x_j,
/// s = x_i + x_j, each unordered pair contributes
///   d^T A_ij d + (s^T A_ij d - d^T A_ij s) / 2;
/// the second (commutator) term vanishes when the precisions commute, e.g.
/// in one dimension, where the sum reduces to the familiar
/// 1/2 sum_{i,j} (x_i - x_j)^T A_ij (x_i - x_j).
/// For Normal priors the per-item shrinkage sum is reported separately via
/// shrink_out (quadform = pairwise + shrinkage). Exists as the algebraic
/// cross-check of cluster_fit_quadform; the quadratic form is the
/// computation path.
double cluster_fit_pairwise(const Dataset& data, const std::vector<int>& members,
                            const PriorSpec& prior, double* shrink_out = nullptr);

/// Log-likelihood contribution of a single cluster, all terms included
/// (per-item data terms, per-cluster prior normalization, complexity, fit
/// and shrinkage folded into the quadratic form).
double cluster_contribution(const ClusterStats& stats, const PriorSpec& prior);

/// Exact partition log-likelihood with per-term breakdown.
LikelihoodBreakdown log_likelihood(const Dataset& data, const Partition& partition,
                                   const PriorSpec& prior);

/// sum_g (1/2n_g) sum_{i,j in G_g} ||x_i - x_j||^2; the sigma -> 0 limit
/// object of the fit term.
double within_group_ss(const Dataset& data, const Partition& partition);

/// Numerically integrates the cluster marginal over its mean (times the
/// prior density for Normal) and returns the log. Test-support oracle:
/// 1-D only, cluster sizes <= 8, adaptive quadrature over mean +- 12 pooled
/// standard deviations at 1e-9 relative tolerance.
double quadrature_oracle(const Dataset& data, const std::vector<int>& members,
                         const PriorSpec& prior);

/// Mutable search state: per-cluster stats and contributions, supporting
/// O(1)-per-cluster move deltas. Owned by exactly one worker; the Dataset it
/// references is shared read-only.
class MoveState {
 public:
  static constexpr int kNewCluster = -1;

  MoveState(const Dataset& data, Partition start, const PriorSpec& prior);

  int num_clusters() const { return static_cast<int>(stats_.size()); }
  int cluster_of(int item) const { return labels_[item]; }
  int cluster_size(int g) const { return stats_[g].count; }
  double total() const { return total_; }
  Partition partition() const { return Partition::compacted(labels_); }

  /// Log-likelihood change of moving item to target (kNewCluster opens a new
  /// singleton cluster). Pure propose; no state change.
  double move_delta(int item, int target) const;

  /// Applies the move; deletes and renumbers the source cluster if emptied.
  void commit(int item, int target);

 private:
  const Dataset* data_;
  const PriorSpec* prior_;
  std::vector<int> labels_;
  std::vector<ClusterStats> stats_;
  std::vector<double> contrib_;
  double total_ = 0.0;
};

}  // namespace mnclust
