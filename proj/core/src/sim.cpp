#include "mnclust/sim.hpp"

#include <cmath>
#include <string>

#include "mnclust/stats.hpp"

namespace mnclust {

void SimulationConfig::validate() const {
  if (dim < 1) throw ConfigError("sim: dim must be >= 1");
  if (cluster_sizes.empty()) throw ConfigError("sim: cluster_sizes must be nonempty");
  for (int sz : cluster_sizes) {
    if (sz < 1) throw ConfigError("sim: cluster sizes must be positive");
  }
  if (s0 <= 0.0) throw ConfigError("sim: s0 must be positive");
  if (a0 < 0.0 || b0 < 0.0) throw ConfigError("sim: a0 and b0 must be nonnegative");
  if (a0 == 0.0) {
    // b0 > 0 alone gives a rank-one S0; b0 == 0 gives zero.
    throw ConfigError("sim: a0 = 0 does not yield an SPD S0");
  }
  if (s <= 0.0 || a <= 0.0) throw ConfigError("sim: s*a must be positive");
  if (b < 0.0) throw ConfigError("sim: b must be nonnegative");
  if (c < 0.0) throw ConfigError("sim: c must be nonnegative");
  if (n_candidates < static_cast<int>(cluster_sizes.size())) {
    throw ConfigError("sim: n_candidates smaller than the cluster count");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sim: alpha must be in (0,1)");
}

SpdMatrix build_s0(const SimulationConfig& config) {
  config.validate();
  const int p = config.dim;
  Mat m = config.s0 * (config.a0 * Mat::Identity(p, p) +
                       config.b0 * Mat::Ones(p, p));
  SpdMatrix s0(std::move(m));
  cholesky(s0);  // surfaces NotPositiveDefinite on degenerate settings
  return s0;
}

SpdMatrix sample_cluster_cov(const SimulationConfig& config, RandomStream& rng) {
  const int p = config.dim;
  Vec u(p), r(p);
  for (int i = 0; i < p; ++i) u(i) = rng.uniform();
  for (int i = 0; i < p; ++i) r(i) = rng.uniform();
  Mat m = config.s * (config.a * Mat(u.asDiagonal()) +
                      config.b * (r * r.transpose()));
  return SpdMatrix(std::move(m));
}

SimulatedDataset generate(const SimulationConfig& config) {
  config.validate();
  const int p = config.dim;
  const int n_clusters = static_cast<int>(config.cluster_sizes.size());

  RandomStream root(config.seed);
  RandomStream pool_rng = root.substream(0);
  RandomStream item_rng = root.substream(1);

  SpdMatrix s0 = build_s0(config);
  CholeskyFactor s0_chol = cholesky(s0);

  // Candidate pool.
  std::vector<Vec> mus(config.n_candidates);
  std::vector<SpdMatrix> covs;
  covs.reserve(config.n_candidates);
  std::vector<double> p_values(config.n_candidates);
  Vec zero = Vec::Zero(p);
  for (int i = 0; i < config.n_candidates; ++i) {
    mus[i] = sample_mvn(zero, s0_chol, pool_rng);
    covs.push_back(sample_cluster_cov(config, pool_rng));
    double stat;
    if (config.filter_covariance == SimulationConfig::FilterCovariance::SamplingCov) {
      stat = s0_chol.quad_form(mus[i], mus[i]);
    } else {
      stat = cholesky(covs[i]).quad_form(mus[i], mus[i]);
    }
    p_values[i] = chisq_sf(stat, p);
  }
  if (config.filter_fdr) p_values = fdr_adjust(p_values);

  std::vector<int> survivors;
  for (int i = 0; i < config.n_candidates && static_cast<int>(survivors.size()) < n_clusters; ++i) {
    if (p_values[i] < config.alpha) survivors.push_back(i);
  }
  if (static_cast<int>(survivors.size()) < n_clusters) {
    throw InsufficientSurvivors(
        "sim: only " + std::to_string(survivors.size()) + " of " +
        std::to_string(n_clusters) + " significant candidate pairs found");
  }

  std::vector<GaussianItem> items;
  std::vector<int> truth_labels;
  std::vector<TrueCluster> true_clusters;
  double sum_mu_sq = 0.0;
  double sum_dev_sq = 0.0;
  int n_items = 0;

  for (int g = 0; g < n_clusters; ++g) {
    const Vec& mu = mus[survivors[g]];
    const SpdMatrix& cov = covs[survivors[g]];
    CholeskyFactor cov_chol = cholesky(cov);
    const double cov_mean = cov.matrix().mean();
    true_clusters.push_back({mu, cov.matrix(), config.cluster_sizes[g]});
    sum_mu_sq += mu.squaredNorm();

    for (int j = 0; j < config.cluster_sizes[g]; ++j) {
      Vec x = sample_mvn(mu, cov_chol, item_rng);
      Mat obs_cov = cov.matrix();
      if (config.c > 0.0) {
        Vec v(p);
        for (int d = 0; d < p; ++d) v(d) = item_rng.uniform();
        obs_cov += config.c * cov_mean * (v * v.transpose());
      }
      char id[16];
      std::snprintf(id, sizeof(id), "item%04d", n_items + 1);
      items.push_back(GaussianItem::from_covariance(id, x, std::move(obs_cov)));
      truth_labels.push_back(g);
      sum_dev_sq += (items.back().mean - mu).squaredNorm();
      ++n_items;
    }
  }

  return SimulatedDataset{
      Dataset(std::move(items)), Partition::from_labels(std::move(truth_labels)),
      std::move(true_clusters), sum_mu_sq / n_clusters, sum_dev_sq / n_items};
}

std::vector<int> published_cluster_sizes() {
  return {14, 14, 12, 12, 11, 11, 11, 11, 9, 9, 9, 9, 8, 8, 8, 8, 7, 7,
          7,  7,  6,  6,  6,  6,  5,  5,  5, 5, 4, 4, 4, 4, 4, 4, 3, 3,
          3,  3,  3,  3,  3,  3,  2,  2,  2, 2, 2, 2, 2, 2};
}

}  // namespace mnclust
