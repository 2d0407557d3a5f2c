#pragma once

#include <string>
#include <vector>

#include "mnclust/linalg.hpp"

namespace mnclust {

/// One item to be clustered: a multivariate normal estimate (mean x_i with
/// SPD precision Gamma_i) plus the cached quantities every likelihood
/// evaluation needs. Covariance inputs are inverted exactly once here.
struct GaussianItem {
  std::string id;
  Vec mean;                   // x_i
  Mat precision;              // Gamma_i
  CholeskyFactor precision_chol;
  double log_det_2pi_cov;     // log|2 pi Gamma_i^{-1}|
  Vec precision_times_mean;   // Gamma_i x_i
  double quad_self;           // x_i^T Gamma_i x_i

  static GaussianItem from_covariance(std::string id, Vec mean, Mat covariance);
  static GaussianItem from_precision(std::string id, Vec mean, Mat precision);

  int dim() const { return static_cast<int>(mean.size()); }

  /// Sigma_i recovered from the stored precision.
  Mat covariance() const { return precision_chol.inverse(); }
};

/// Immutable collection of items sharing one dimension. Item order is load
/// order; "smallest item" in canonical labeling means smallest load index.
class Dataset {
 public:
  explicit Dataset(std::vector<GaussianItem> items);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(items_.size()); }
  const GaussianItem& item(int i) const { return items_[i]; }
  const std::vector<GaussianItem>& items() const { return items_; }

  /// Throws UnknownId.
  int index_of(const std::string& id) const;

 private:
  int dim_;
  std::vector<GaussianItem> items_;
};

/// Assignment of every item to one of m nonempty clusters, labels 0..m-1.
class Partition {
 public:
  /// Labels must be exactly 0..m-1 with every label present.
  static Partition from_labels(std::vector<int> labels);

  /// Relabels arbitrary labels densely by order of first appearance. This is
  /// also the canonical form: clusters numbered by ascending smallest member
  /// index.
  static Partition compacted(const std::vector<int>& raw);

  static Partition all_singletons(int n);
  static Partition single_cluster(int n);

  int size() const { return static_cast<int>(labels_.size()); }
  int num_clusters() const { return num_clusters_; }
  int label(int item) const { return labels_[item]; }
  const std::vector<int>& labels() const { return labels_; }

  /// Member indices per cluster, in item order.
  std::vector<std::vector<int>> clusters() const;

  bool operator==(const Partition&) const = default;

 private:
  Partition(std::vector<int> labels, int m)
      : labels_(std::move(labels)), num_clusters_(m) {}
  std::vector<int> labels_;
  int num_clusters_ = 0;
};

/// Unique labeling of equivalent clusterings: clusters renumbered by the
/// smallest item index they contain. Idempotent; two partitions induce the
/// same cluster sets iff their canonical forms are identical.
Partition canonicalize(const Partition& p);

/// Additive per-cluster sufficient statistics. stats(A u B) = stats(A) +
/// stats(B) fieldwise for disjoint A, B, which is what makes single-item
/// move deltas O(1) likelihood recomputations.
struct ClusterStats {
  int count = 0;
  Mat sum_precision;        // sum Gamma_k
  Vec sum_precision_mean;   // sum Gamma_k x_k
  double sum_quad = 0.0;    // sum x_k^T Gamma_k x_k
  double sum_log_det_2pi_cov = 0.0;

  static ClusterStats zero(int dim);

  int dim() const { return static_cast<int>(sum_precision.rows()); }
  void add(const GaussianItem& item);
  /// Throws EmptyClusterResult if already empty. Removing the last item
  /// leaves exact zeros.
  void remove(const GaussianItem& item);
};

ClusterStats operator+(const ClusterStats& a, const ClusterStats& b);

ClusterStats cluster_stats(const Dataset& data, const std::vector<int>& members);

}  // namespace mnclust
