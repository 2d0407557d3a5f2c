#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mnclust/likelihood.hpp"
#include "mnclust/model.hpp"

namespace mnclust {

/// Result of the equal-means chi-squared test. Each within-cluster pair
/// contributes a p-dimensional quadratic form, so the degrees of freedom are
/// dof = p * sum_g n_g(n_g-1)/2 (p times the number of distinct pairs).
struct ChiSqResult {
  double statistic = 0.0;
  long dof = 0;
  double p_value = 1.0;
};

/// Chi-squared survival function: regularized upper incomplete gamma
/// Q(dof/2, x/2).
double chisq_sf(double x, long dof);

/// Benjamini-Hochberg step-up adjustment; outputs in input order.
std::vector<double> fdr_adjust(const std::vector<double>& p_values);

/// Test of equal means within every cluster:
///   statistic = sum_g sum_{i<j in G_g} (x_i-x_j)^T (Sigma_i+Sigma_j)^{-1} (x_i-x_j)
/// Covariances are recovered from the stored precisions.
ChiSqResult equal_means_chisq(const Dataset& data, const Partition& partition);

/// Same test with per-pair terms memoized across calls; the pair statistic is
/// partition-independent, and nested dendrogram cuts revisit the same pairs.
class EqualMeansTester {
 public:
  explicit EqualMeansTester(const Dataset& data);
  ChiSqResult test(const Partition& partition);

 private:
  double pair_term(int i, int j);

  const Dataset* data_;
  std::vector<Mat> covariances_;
  std::unordered_map<long long, double> pair_terms_;
};

struct SelectionRow {
  int k = 0;
  double loglik_flat = 0.0;
  std::optional<double> loglik_normal;
  double chisq = 0.0;
  long dof = 0;
  double p_value = 1.0;
  Partition partition = Partition::all_singletons(1);
};

/// Per-k model selection table plus the two selection flags: the
/// likelihood-argmax k and the fewest clusters with p >= alpha.
struct SelectionReport {
  std::vector<SelectionRow> rows;
  double alpha = 0.05;
  int best_k_flat = 0;
  std::optional<int> best_k_normal;
  std::optional<int> fewest_k_significant;
};

/// Evaluates one candidate partition per k (keys must equal the partitions'
/// cluster counts, strictly increasing). The flat-prior likelihood is always
/// computed; a Normal prior adds the second column.
SelectionReport select_k(const Dataset& data,
                         const std::map<int, Partition>& partitions_by_k,
                         const std::optional<PriorSpec>& normal_prior,
                         double alpha = 0.05);

/// Adjusted Rand index between two partitions of the same items.
double adjusted_rand_index(const Partition& a, const Partition& b);

}  // namespace mnclust
