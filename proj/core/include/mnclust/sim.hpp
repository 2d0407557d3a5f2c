#pragma once

#include <cstdint>
#include <vector>

#include "mnclust/model.hpp"
#include "mnclust/rng.hpp"

namespace mnclust {

/// Synthetic benchmark configuration. The base covariance for cluster means
/// is S0 = s0 (a0 I + b0 ones); per-cluster covariances are
/// S = s (a diag(u) + b r r^T) with u, r ~ U(0,1)^p. Candidate (mu, S) pairs
/// are screened by a chi-squared significance test of mu against 0 before
/// clusters are formed.
struct SimulationConfig {
  /// Which covariance the screening statistic mu^T C^{-1} mu uses.
  /// ClusterCov (C = S_g, the candidate's own covariance, FDR-adjusted
  /// across the pool) is the default screening rule. SamplingCov (C = S0,
  /// the null distribution of mu, plain per-candidate test) is a variant
  /// that applies much stronger selection; it roughly doubles E[||mu||^2]
  /// relative to trace(S0).
  enum class FilterCovariance { SamplingCov, ClusterCov };

  int dim = 10;
  std::vector<int> cluster_sizes;
  double s0 = 1.0, a0 = 1.0, b0 = 0.0;  // S0 construction
  double s = 0.1, a = 1.0, b = 6.0;     // per-cluster covariance construction
  double c = 0.0;                       // observation covariance noise scale
  int n_candidates = 10000;
  double alpha = 0.05;
  FilterCovariance filter_covariance = FilterCovariance::ClusterCov;
  bool filter_fdr = true;
  std::uint64_t seed = 0;

  /// Throws ConfigError on invalid settings (e.g. a0 = 0 with b0 > 0, which
  /// makes S0 rank one).
  void validate() const;
};

struct TrueCluster {
  Vec mu;
  Mat cov;  // S_g
  int size = 0;
};

struct SimulatedDataset {
  Dataset dataset;
  Partition truth;
  std::vector<TrueCluster> true_clusters;
  double e_mu_sq = 0.0;  // mean ||mu_g||^2 over the kept clusters
  double e_x_sq = 0.0;   // mean ||x_i - mu_g||^2 over items (noise energy)
};

/// S0 = s0 (a0 diag(1,p) + b0 outer(rep(1,p), rep(1,p))).
SpdMatrix build_s0(const SimulationConfig& config);

/// One draw of S = s (a diag(u) + b outer(r, r)), u, r ~ U(0,1)^p.
SpdMatrix sample_cluster_cov(const SimulationConfig& config, RandomStream& rng);

/// Full pipeline: sample the candidate pool, screen it, fill the size list
/// with the first survivors in pool order, sample items x_i ~ N(mu_g, S_g),
/// and perturb observation covariances as
/// S_i = S_g + c * mean(S_g) * outer(v_i, v_i), v_i ~ U(0,1)^p (mean over all
/// p^2 entries). Throws InsufficientSurvivors if the pool runs dry.
SimulatedDataset generate(const SimulationConfig& config);

/// The 50-entry published cluster-size list (300 items, sizes 2..14).
std::vector<int> published_cluster_sizes();

}  // namespace mnclust
