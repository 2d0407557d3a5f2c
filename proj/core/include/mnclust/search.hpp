#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mnclust/likelihood.hpp"
#include "mnclust/model.hpp"
#include "mnclust/rng.hpp"

namespace mnclust {

/// Bhattacharyya distance between two Gaussian items:
///   1/8 (mu_a - mu_b)^T Sbar^{-1} (mu_a - mu_b)
///     + 1/2 log(|Sbar| / sqrt(|Sigma_a| |Sigma_b|)),   Sbar = (Sigma_a + Sigma_b)/2.
double bhattacharyya_distance(const GaussianItem& a, const GaussianItem& b);

/// Full symmetric distance matrix; covariances are recovered once per item.
Mat bhattacharyya_matrix(const Dataset& data);

/// Agglomeration tree: n leaves (nodes 0..n-1), n-1 merges (merge t creates
/// node n+t). Merge heights are nondecreasing; cutting after the first n-k
/// merges yields exactly k clusters, and the k-cuts form a refinement chain.
struct Dendrogram {
  struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
  };
  int n = 0;
  std::vector<Merge> merges;
};

/// Ward-D2 agglomeration: Lance-Williams recurrence on squared
/// dissimilarities, heights reported as square roots. Ties are broken by the
/// lexicographically smallest (smallest-leaf-index) pair.
Dendrogram ward_d2_dendrogram(const Mat& distances);

/// Partition with exactly k clusters, labeled canonically.
Partition cut_dendrogram(const Dendrogram& d, int k);

struct SearchConfig {
  enum class Mode { Greedy, Metropolis };
  Mode mode = Mode::Greedy;
  int max_sweeps = 100;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int restarts = 1;
  long steps = 100000;  // Metropolis chain length
};

/// Hill climbing over single-item moves (including moves to a new singleton
/// cluster). Restart 0 starts from `start`; further restarts use random
/// initial partitions. Deterministic given the seed; the returned total is
/// never below the start's.
std::pair<Partition, LikelihoodBreakdown> greedy_improve(const Dataset& data,
                                                         const Partition& start,
                                                         const PriorSpec& prior,
                                                         const SearchConfig& config);

struct SampleRecord {
  Partition partition = Partition::all_singletons(1);  // canonical form
  double total = 0.0;
  long visits = 0;
};

/// Metropolis-Hastings over partitions. Proposals pick a uniform (item,
/// target) pair with target ranging over current clusters plus one new
/// cluster; acceptance is min(1, exp(delta/T) * q-ratio) where the q-ratio
/// corrects for the cluster-count-dependent proposal density (required for
/// the chain to target exp(total/T) under the constant-P(G) convention).
/// Returns visit counts per canonical partition, most visited first.
std::vector<SampleRecord> metropolis_sample(const Dataset& data,
                                            const Partition& start,
                                            const PriorSpec& prior,
                                            const SearchConfig& config);

}  // namespace mnclust
