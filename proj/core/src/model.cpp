#include "mnclust/model.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace mnclust {

GaussianItem GaussianItem::from_covariance(std::string id, Vec mean,
                                           Mat covariance) {
  if (covariance.rows() != mean.size()) {
    throw DimensionMismatch("item '" + id +
                            "': covariance does not match mean length");
  }
  SpdMatrix cov(std::move(covariance));
  CholeskyFactor cov_chol = [&] {
    try {
      return cholesky(cov);
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite("item '" + id +
                                "': covariance is not positive definite");
    }
  }();
  return from_precision(std::move(id), std::move(mean), cov_chol.inverse());
}

GaussianItem GaussianItem::from_precision(std::string id, Vec mean,
                                          Mat precision) {
  if (precision.rows() != mean.size()) {
    throw DimensionMismatch("item '" + id +
                            "': precision does not match mean length");
  }
  SpdMatrix prec(std::move(precision));
  CholeskyFactor chol = [&] {
    try {
      return cholesky(prec);
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite("item '" + id +
                                "': precision is not positive definite");
    }
  }();
  Vec ptm = prec.matrix() * mean;
  double quad = mean.dot(ptm);
  double ld = chol.log_det_2pi_inv();
  return GaussianItem{std::move(id),  std::move(mean), prec.matrix(),
                      std::move(chol), ld,             std::move(ptm),
                      quad};
}

Dataset::Dataset(std::vector<GaussianItem> items) : items_(std::move(items)) {
  if (items_.empty()) throw ConfigError("dataset must contain at least one item");
  dim_ = items_.front().dim();
  std::unordered_set<std::string> seen;
  for (const auto& it : items_) {
    if (it.dim() != dim_) {
      throw DimensionMismatch("item '" + it.id +
                              "': dimension differs from the dataset's");
    }
    if (!seen.insert(it.id).second) {
      throw DuplicateId("duplicate item id '" + it.id + "'");
    }
  }
}

int Dataset::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i) {
    if (items_[i].id == id) return i;
  }
  throw UnknownId("unknown item id '" + id + "'");
}

Partition Partition::from_labels(std::vector<int> labels) {
  if (labels.empty()) throw ConfigError("partition must be nonempty");
  int m = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<char> present(m, 0);
  for (int l : labels) {
    if (l < 0 || l >= m) throw ConfigError("partition labels must be 0..m-1");
    present[l] = 1;
  }
  if (std::find(present.begin(), present.end(), 0) != present.end()) {
    throw ConfigError("partition has an empty cluster label");
  }
  return Partition(std::move(labels), m);
}

Partition Partition::compacted(const std::vector<int>& raw) {
  std::unordered_map<int, int> relabel;
  std::vector<int> labels;
  labels.reserve(raw.size());
  for (int l : raw) {
    auto [it, inserted] = relabel.emplace(l, static_cast<int>(relabel.size()));
    labels.push_back(it->second);
  }
  int m = static_cast<int>(relabel.size());
  return Partition(std::move(labels), m);
}

Partition Partition::all_singletons(int n) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i;
  return Partition(std::move(labels), n);
}

Partition Partition::single_cluster(int n) {
  return Partition(std::vector<int>(n, 0), n > 0 ? 1 : 0);
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(num_clusters_);
  for (int i = 0; i < size(); ++i) out[labels_[i]].push_back(i);
  return out;
}

Partition canonicalize(const Partition& p) {
  return Partition::compacted(p.labels());
}

ClusterStats ClusterStats::zero(int dim) {
  ClusterStats s;
  s.sum_precision = Mat::Zero(dim, dim);
  s.sum_precision_mean = Vec::Zero(dim);
  return s;
}

void ClusterStats::add(const GaussianItem& item) {
  if (item.dim() != dim()) {
    throw DimensionMismatch("ClusterStats::add: dimension mismatch");
  }
  ++count;
  sum_precision += item.precision;
  sum_precision_mean += item.precision_times_mean;
  sum_quad += item.quad_self;
  sum_log_det_2pi_cov += item.log_det_2pi_cov;
}

void ClusterStats::remove(const GaussianItem& item) {
  if (count == 0) {
    throw EmptyClusterResult("ClusterStats::remove: stats already empty");
  }
  --count;
  if (count == 0) {
    sum_precision.setZero();
    sum_precision_mean.setZero();
    sum_quad = 0.0;
    sum_log_det_2pi_cov = 0.0;
    return;
  }
  sum_precision -= item.precision;
  sum_precision_mean -= item.precision_times_mean;
  sum_quad -= item.quad_self;
  sum_log_det_2pi_cov -= item.log_det_2pi_cov;
}

ClusterStats operator+(const ClusterStats& a, const ClusterStats& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("ClusterStats addition: dimension mismatch");
  }
  ClusterStats s = a;
  s.count += b.count;
  s.sum_precision += b.sum_precision;
  s.sum_precision_mean += b.sum_precision_mean;
  s.sum_quad += b.sum_quad;
  s.sum_log_det_2pi_cov += b.sum_log_det_2pi_cov;
  return s;
}

ClusterStats cluster_stats(const Dataset& data, const std::vector<int>& members) {
  if (members.empty()) {
    throw ConfigError("cluster_stats: member list must be nonempty");
  }
  ClusterStats s = ClusterStats::zero(data.dim());
  for (int i : members) {
    if (i < 0 || i >= data.size()) {
      throw UnknownId("cluster_stats: item index out of range");
    }
    s.add(data.item(i));
  }
  return s;
}

}  // namespace mnclust
