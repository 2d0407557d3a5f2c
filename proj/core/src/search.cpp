#include "mnclust/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mnclust {

double bhattacharyya_distance(const GaussianItem& a, const GaussianItem& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("bhattacharyya_distance: dimensions differ");
  }
  Mat cov_a = a.covariance();
  Mat cov_b = b.covariance();
  Mat mid = 0.5 * (cov_a + cov_b);
  CholeskyFactor f = CholeskyFactor::compute(mid);
  Vec d = a.mean - b.mean;
  // log|Sigma| = -log|Gamma|, available from the stored precision factor.
  double log_det_a = -a.precision_chol.log_det();
  double log_det_b = -b.precision_chol.log_det();
  return 0.125 * f.quad_form(d, d) +
         0.5 * (f.log_det() - 0.5 * (log_det_a + log_det_b));
}

Mat bhattacharyya_matrix(const Dataset& data) {
  const int n = data.size();
  std::vector<Mat> covs;
  covs.reserve(n);
  std::vector<double> log_dets(n);
  for (int i = 0; i < n; ++i) {
    covs.push_back(data.item(i).covariance());
    log_dets[i] = -data.item(i).precision_chol.log_det();
  }
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Mat mid = 0.5 * (covs[i] + covs[j]);
      CholeskyFactor f = CholeskyFactor::compute(mid);
      Vec d = data.item(i).mean - data.item(j).mean;
      double v = 0.125 * f.quad_form(d, d) +
                 0.5 * (f.log_det() - 0.5 * (log_dets[i] + log_dets[j]));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Dendrogram ward_d2_dendrogram(const Mat& distances) {
  const int n = static_cast<int>(distances.rows());
  if (distances.cols() != n || n < 1) {
    throw InvalidDistanceMatrix("distance matrix must be square");
  }
  const double scale = std::max(distances.cwiseAbs().maxCoeff(), 1.0);
  for (int i = 0; i < n; ++i) {
    if (std::abs(distances(i, i)) > 1e-12 * scale) {
      throw InvalidDistanceMatrix("distance matrix diagonal must be zero");
    }
    for (int j = i + 1; j < n; ++j) {
      if (distances(i, j) < 0.0) {
        throw InvalidDistanceMatrix("distances must be nonnegative");
      }
      if (std::abs(distances(i, j) - distances(j, i)) > 1e-12 * scale) {
        throw InvalidDistanceMatrix("distance matrix must be symmetric");
      }
    }
  }

  Dendrogram out;
  out.n = n;
  if (n == 1) return out;

  // Active clusters indexed by slot; d2 holds squared dissimilarities.
  Mat d2 = distances.cwiseProduct(distances);
  std::vector<int> node(n), size(n, 1), min_leaf(n);
  std::iota(node.begin(), node.end(), 0);
  std::iota(min_leaf.begin(), min_leaf.end(), 0);
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);

  for (int step = 0; step < n - 1; ++step) {
    int best_a = -1, best_b = -1;
    double best = 0.0;
    std::pair<int, int> best_tie{0, 0};
    for (std::size_t ii = 0; ii < active.size(); ++ii) {
      for (std::size_t jj = ii + 1; jj < active.size(); ++jj) {
        int sa = active[ii], sb = active[jj];
        double v = d2(sa, sb);
        std::pair<int, int> tie{std::min(min_leaf[sa], min_leaf[sb]),
                                std::max(min_leaf[sa], min_leaf[sb])};
        if (best_a < 0 || v < best || (v == best && tie < best_tie)) {
          best = v;
          best_tie = tie;
          best_a = sa;
          best_b = sb;
        }
      }
    }

    out.merges.push_back({node[best_a], node[best_b],
                          std::sqrt(std::max(best, 0.0))});

    const double na = size[best_a], nb = size[best_b];
    for (int sk : active) {
      if (sk == best_a || sk == best_b) continue;
      const double nk = size[sk];
      double v = ((na + nk) * d2(best_a, sk) + (nb + nk) * d2(best_b, sk) -
                  nk * best) /
                 (na + nb + nk);
      d2(best_a, sk) = v;
      d2(sk, best_a) = v;
    }
    node[best_a] = n + step;
    size[best_a] += size[best_b];
    min_leaf[best_a] = std::min(min_leaf[best_a], min_leaf[best_b]);
    active.erase(std::find(active.begin(), active.end(), best_b));
  }
  return out;
}

Partition cut_dendrogram(const Dendrogram& d, int k) {
  if (k < 1 || k > d.n) throw KOutOfRange("cut_dendrogram: k out of 1..n");
  // Union-find over the first n-k merges.
  std::vector<int> parent(2 * d.n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int t = 0; t < d.n - k; ++t) {
    const auto& m = d.merges[t];
    int target = d.n + t;
    parent[find(m.left)] = target;
    parent[find(m.right)] = target;
  }
  std::vector<int> roots(d.n);
  for (int i = 0; i < d.n; ++i) roots[i] = find(i);
  return Partition::compacted(roots);
}

namespace {

Partition random_partition(int n, RandomStream& rng) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  }
  return Partition::compacted(labels);
}

// One full pass of best-improvement moves; returns true if any move landed.
bool greedy_sweep(MoveState& state, RandomStream& rng) {
  const int n = static_cast<int>(state.partition().size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }

  bool moved = false;
  for (int item : order) {
    const int from = state.cluster_of(item);
    int best_target = from;
    double best_delta = 0.0;
    for (int g = 0; g < state.num_clusters(); ++g) {
      if (g == from) continue;
      double delta = state.move_delta(item, g);
      if (delta > best_delta + 1e-12) {
        best_delta = delta;
        best_target = g;
      }
    }
    if (state.cluster_size(from) > 1) {
      double delta = state.move_delta(item, MoveState::kNewCluster);
      if (delta > best_delta + 1e-12) {
        best_delta = delta;
        best_target = MoveState::kNewCluster;
      }
    }
    if (best_target != from && best_delta > 1e-12) {
      state.commit(item, best_target);
      moved = true;
    }
  }
  return moved;
}

}  // namespace

std::pair<Partition, LikelihoodBreakdown> greedy_improve(const Dataset& data,
                                                         const Partition& start,
                                                         const PriorSpec& prior,
                                                         const SearchConfig& config) {
  if (config.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  if (config.restarts < 1) throw ConfigError("restarts must be >= 1");
  RandomStream root(config.seed);

  Partition best = canonicalize(start);
  double best_total = log_likelihood(data, best, prior).total;

  for (int r = 0; r < config.restarts; ++r) {
    RandomStream rng = root.substream(static_cast<std::uint64_t>(r));
    Partition init = r == 0 ? start : random_partition(data.size(), rng);
    MoveState state(data, init, prior);
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
      if (!greedy_sweep(state, rng)) break;
    }
    if (state.total() > best_total) {
      best_total = state.total();
      best = state.partition();
    }
  }
  return {best, log_likelihood(data, best, prior)};
}

std::vector<SampleRecord> metropolis_sample(const Dataset& data,
                                            const Partition& start,
                                            const PriorSpec& prior,
                                            const SearchConfig& config) {
  if (config.temperature <= 0.0) throw ConfigError("temperature must be positive");
  if (config.steps < 1) throw ConfigError("steps must be >= 1");
  RandomStream rng(config.seed);
  MoveState state(data, canonicalize(start), prior);
  const int n = data.size();

  std::map<std::vector<int>, SampleRecord> records;
  auto record_visit = [&]() {
    Partition p = canonicalize(state.partition());
    auto [it, inserted] =
        records.try_emplace(p.labels(), SampleRecord{p, state.total(), 0});
    ++it->second.visits;
  };

  for (long step = 0; step < config.steps; ++step) {
    const int m = state.num_clusters();
    const int item = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const int target = static_cast<int>(
        rng.uniform_int(static_cast<std::uint64_t>(m + 1)));
    const int from = state.cluster_of(item);
    const bool to_new = target == m;

    if (target == from || (to_new && state.cluster_size(from) == 1)) {
      record_visit();  // self-loop
      continue;
    }

    const double delta = state.move_delta(item, to_new ? MoveState::kNewCluster
                                                       : target);
    // Cluster count after the move, for the proposal-density correction.
    int m_new = m;
    if (to_new) ++m_new;
    if (state.cluster_size(from) == 1) --m_new;
    const double log_q_ratio =
        std::log(static_cast<double>(m + 1) / static_cast<double>(m_new + 1));

    const double log_accept = delta / config.temperature + log_q_ratio;
    if (log_accept >= 0.0 || std::log(rng.uniform() + 1e-300) < log_accept) {
      state.commit(item, to_new ? MoveState::kNewCluster : target);
    }
    record_visit();
  }

  std::vector<SampleRecord> out;
  out.reserve(records.size());
  for (auto& [labels, rec] : records) out.push_back(std::move(rec));
  std::sort(out.begin(), out.end(), [](const SampleRecord& a, const SampleRecord& b) {
    return a.visits > b.visits;
  });
  return out;
}

}  // namespace mnclust
