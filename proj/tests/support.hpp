#pragma once

// Shared test helpers: random instance generators, exhaustive partition
// enumeration, and independent oracles that deliberately avoid the library's
// Cholesky code paths (explicit inverses and determinants instead).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mnclust/likelihood.hpp"
#include "mnclust/model.hpp"
#include "mnclust/rng.hpp"
#include "mnclust/search.hpp"

namespace testsupport {

using namespace mnclust;

inline Mat random_spd(int dim, RandomStream& rng, double scale = 1.0) {
  Mat a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = rng.normal();
  }
  Mat m = scale * (a * a.transpose()) + 0.1 * scale * Mat::Identity(dim, dim);
  return 0.5 * (m + m.transpose());
}

inline Vec random_vec(int dim, RandomStream& rng, double scale = 1.0) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * rng.normal();
  return v;
}

inline Dataset random_dataset(int n, int dim, RandomStream& rng,
                              double mean_scale = 2.0) {
  std::vector<GaussianItem> items;
  items.reserve(n);
  for (int i = 0; i < n; ++i) {
    items.push_back(GaussianItem::from_covariance(
        "t" + std::to_string(i), random_vec(dim, rng, mean_scale),
        random_spd(dim, rng)));
  }
  return Dataset(std::move(items));
}

/// Every set partition of {0..n-1} as a restricted-growth label string.
inline std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> labels(n, 0);
  auto rec = [&](auto&& self, int i, int max_label) -> void {
    if (i == n) {
      out.push_back(labels);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      labels[i] = l;
      self(self, i + 1, std::max(max_label, l));
    }
  };
  rec(rec, 1, 0);  // item 0 fixed at label 0
  return out;
}

/// Partition log-likelihood recomputed from first principles with explicit
/// inverses and determinants; no shared code with the production evaluator
/// beyond the item caches.
inline double brute_force_total(const Dataset& data, const Partition& partition,
                                const PriorSpec& prior) {
  const int p = data.dim();
  const double log2pi = std::log(2.0 * std::acos(-1.0));
  double total = 0.0;
  for (const auto& members : partition.clusters()) {
    Mat sum_prec = Mat::Zero(p, p);
    Vec sum_pm = Vec::Zero(p);
    double sum_quad = 0.0;
    for (int i : members) {
      const auto& it = data.item(i);
      Mat gamma = it.precision;
      sum_prec += gamma;
      sum_pm += gamma * it.mean;
      sum_quad += it.mean.dot(gamma * it.mean);
      // -1/2 log|2 pi Gamma^{-1}| = -1/2 (p log 2pi - log|Gamma|)
      total -= 0.5 * (p * log2pi - std::log(gamma.determinant()));
    }
    Mat post = sum_prec;
    if (prior.is_normal()) {
      post += prior.prior_precision();
      total -= 0.5 * (p * log2pi -
                      std::log(prior.prior_precision().determinant()));
    }
    Mat post_inv = post.inverse();
    total += 0.5 * (p * log2pi - std::log(post.determinant()));
    total -= 0.5 * (sum_quad - sum_pm.dot(post_inv * sum_pm));
  }
  return total;
}

/// Plain O(n^3) Lance-Williams Ward-D2 agglomeration over explicit cluster
/// lists; mirrors the production tie rule (smallest min-leaf pair).
inline Dendrogram naive_ward(const Mat& distances) {
  const int n = static_cast<int>(distances.rows());
  struct Cluster {
    int node;
    int size;
    int min_leaf;
  };
  std::vector<Cluster> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i, 1, i});
  Mat d2 = distances.cwiseProduct(distances);

  Dendrogram out;
  out.n = n;
  for (int step = 0; step < n - 1; ++step) {
    int bi = -1, bj = -1;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        if (bi < 0) {
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
          continue;
        }
        double v = d2(i, j), best = d2(bi, bj);
        auto tie = std::minmax(clusters[i].min_leaf, clusters[j].min_leaf);
        auto best_tie =
            std::minmax(clusters[bi].min_leaf, clusters[bj].min_leaf);
        if (v < best || (v == best && tie < best_tie)) {
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    }
    const double merged_d2 = d2(bi, bj);
    out.merges.push_back({clusters[bi].node, clusters[bj].node,
                          std::sqrt(std::max(merged_d2, 0.0))});

    const int m = static_cast<int>(clusters.size());
    Mat next = Mat::Zero(m - 1, m - 1);
    std::vector<Cluster> next_clusters;
    std::vector<int> keep;
    for (int i = 0; i < m; ++i) {
      if (i != bi && i != bj) keep.push_back(i);
    }
    Cluster merged{n + step, clusters[bi].size + clusters[bj].size,
                   std::min(clusters[bi].min_leaf, clusters[bj].min_leaf)};
    next_clusters.push_back(merged);
    for (std::size_t a = 0; a < keep.size(); ++a) {
      const Cluster& ck = clusters[keep[a]];
      double v = ((clusters[bi].size + ck.size) * d2(bi, keep[a]) +
                  (clusters[bj].size + ck.size) * d2(bj, keep[a]) -
                  ck.size * merged_d2) /
                 (clusters[bi].size + clusters[bj].size + ck.size);
      next(0, static_cast<int>(a) + 1) = v;
      next(static_cast<int>(a) + 1, 0) = v;
      next_clusters.push_back(ck);
    }
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = a + 1; b < keep.size(); ++b) {
        next(static_cast<int>(a) + 1, static_cast<int>(b) + 1) =
            d2(keep[a], keep[b]);
        next(static_cast<int>(b) + 1, static_cast<int>(a) + 1) =
            d2(keep[a], keep[b]);
      }
    }
    d2 = std::move(next);
    clusters = std::move(next_clusters);
  }
  return out;
}

}  // namespace testsupport
