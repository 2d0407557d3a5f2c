#include "mnclust/likelihood.hpp"

#include <cmath>
#include <numbers>

namespace mnclust {

PriorSpec PriorSpec::normal(const SpdMatrix& prior_precision) {
  PriorSpec p;
  p.kind_ = Kind::Normal;
  p.prior_precision_ = prior_precision.matrix();
  p.log_det_2pi_prior_cov_ = cholesky(prior_precision).log_det_2pi_inv();
  return p;
}

PriorSpec PriorSpec::isotropic_normal(int dim, double sigma2) {
  if (sigma2 <= 0.0) throw ConfigError("prior sigma2 must be positive");
  return normal(SpdMatrix(Mat::Identity(dim, dim) / sigma2));
}

namespace {

void check_prior_dim(const PriorSpec& prior, int dim) {
  if (prior.is_normal() && prior.dim() != dim) {
    throw DimensionMismatch("prior precision dimension does not match data");
  }
}

CholeskyFactor posterior_chol(const ClusterStats& stats, const PriorSpec& prior) {
  if (prior.is_normal()) {
    return CholeskyFactor::compute(prior.prior_precision() + stats.sum_precision);
  }
  return CholeskyFactor::compute(stats.sum_precision);
}

}  // namespace

double cluster_fit_quadform(const ClusterStats& stats, const PriorSpec& prior) {
  if (stats.count < 1) throw EmptyClusterResult("cluster_fit_quadform: empty cluster");
  check_prior_dim(prior, stats.dim());
  CholeskyFactor f = posterior_chol(stats, prior);
  return stats.sum_quad -
         f.quad_form(stats.sum_precision_mean, stats.sum_precision_mean);
}

double cluster_fit_pairwise(const Dataset& data, const std::vector<int>& members,
                            const PriorSpec& prior, double* shrink_out) {
  if (members.empty()) throw EmptyClusterResult("cluster_fit_pairwise: empty cluster");
  check_prior_dim(prior, data.dim());
  ClusterStats stats = cluster_stats(data, members);
  CholeskyFactor f = posterior_chol(stats, prior);

  double pairwise = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const GaussianItem& ia = data.item(members[a]);
      const GaussianItem& ib = data.item(members[b]);
      Vec d = ia.mean - ib.mean;
      Vec s = ia.mean + ib.mean;
      Vec gad = ia.precision * d;
      Vec gbd = ib.precision * d;
      // Per-pair contribution, A = Gamma_a F^{-1} Gamma_b: the symmetric part
      // d^T A d plus the commutator correction (s^T A d - d^T A s) / 2, which
      // vanishes when the precisions commute (e.g. in one dimension).
      pairwise += gad.dot(f.solve(gbd));
      pairwise += 0.5 * ((ia.precision * s).dot(f.solve(gbd)) -
                         gad.dot(f.solve(ib.precision * s)));
    }
  }

  double shrink = 0.0;
  if (prior.is_normal()) {
    for (int idx : members) {
      const GaussianItem& it = data.item(idx);
      shrink += it.precision_times_mean.dot(
          f.solve(prior.prior_precision() * it.mean));
    }
  }
  if (shrink_out) *shrink_out = shrink;
  return pairwise;
}

double cluster_contribution(const ClusterStats& stats, const PriorSpec& prior) {
  if (stats.count == 0) return 0.0;
  CholeskyFactor f = posterior_chol(stats, prior);
  double q = stats.sum_quad -
             f.quad_form(stats.sum_precision_mean, stats.sum_precision_mean);
  double c = -0.5 * stats.sum_log_det_2pi_cov + 0.5 * f.log_det_2pi_inv() -
             0.5 * q;
  if (prior.is_normal()) c -= 0.5 * prior.log_det_2pi_prior_cov();
  return c;
}

LikelihoodBreakdown log_likelihood(const Dataset& data, const Partition& partition,
                                   const PriorSpec& prior) {
  if (partition.size() != data.size()) {
    throw DimensionMismatch("partition length does not match dataset size");
  }
  check_prior_dim(prior, data.dim());

  LikelihoodBreakdown out;
  for (const auto& members : partition.clusters()) {
    ClusterStats stats = cluster_stats(data, members);
    CholeskyFactor f = posterior_chol(stats, prior);
    double q = stats.sum_quad -
               f.quad_form(stats.sum_precision_mean, stats.sum_precision_mean);

    out.data_term += -0.5 * stats.sum_log_det_2pi_cov;
    out.complexity_term += 0.5 * f.log_det_2pi_inv();
    if (prior.is_normal()) {
      out.prior_norm_term += -0.5 * prior.log_det_2pi_prior_cov();
      double shrink = 0.0;
      Mat w = f.solve_matrix(prior.prior_precision());
      for (int idx : members) {
        const GaussianItem& it = data.item(idx);
        shrink += it.precision_times_mean.dot(w * it.mean);
      }
      out.shrink_term += -0.5 * shrink;
      out.fit_term += -0.5 * (q - shrink);
    } else {
      out.fit_term += -0.5 * q;
    }
  }
  out.total = out.data_term + out.prior_norm_term + out.complexity_term +
              out.fit_term + out.shrink_term;
  return out;
}

double within_group_ss(const Dataset& data, const Partition& partition) {
  if (partition.size() != data.size()) {
    throw DimensionMismatch("partition length does not match dataset size");
  }
  double total = 0.0;
  for (const auto& members : partition.clusters()) {
    double ss = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        ss += (data.item(members[a]).mean - data.item(members[b]).mean)
                  .squaredNorm();
      }
    }
    // (1/2n_g) over both pair orders = (1/n_g) over unique pairs.
    total += ss / members.size();
  }
  return total;
}

namespace {

// Adaptive Simpson on [a, b] for a bounded, smooth integrand.
struct Simpson {
  double (*unused)(double) = nullptr;
};

template <typename F>
double simpson_segment(const F& f, double a, double fa, double b, double fb,
                       double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double m, double fm,
                        double b, double fb, double whole, double tol,
                        int depth) {
  if (depth > 60) {
    throw QuadratureNonConvergence("quadrature_oracle: recursion limit reached");
  }
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson_segment(f, a, fa, m, fm, flm);
  double right = simpson_segment(f, m, fm, b, fb, frm);
  if (std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1) +
         adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double quadrature_oracle(const Dataset& data, const std::vector<int>& members,
                         const PriorSpec& prior) {
  if (data.dim() != 1) {
    throw DimensionMismatch("quadrature_oracle supports 1-D data only");
  }
  if (members.empty() || members.size() > 8) {
    throw ConfigError("quadrature_oracle: cluster size must be 1..8");
  }
  check_prior_dim(prior, 1);

  const double two_pi = 2.0 * std::numbers::pi;
  double prior_prec = prior.is_normal() ? prior.prior_precision()(0, 0) : 0.0;

  // Log integrand: sum of item log-densities, plus prior log-density.
  auto log_f = [&](double mu) {
    double g = 0.0;
    for (int idx : members) {
      const GaussianItem& it = data.item(idx);
      double gamma = it.precision(0, 0);
      double d = it.mean(0) - mu;
      g += 0.5 * std::log(gamma / two_pi) - 0.5 * gamma * d * d;
    }
    if (prior.is_normal()) {
      g += 0.5 * std::log(prior_prec / two_pi) - 0.5 * prior_prec * mu * mu;
    }
    return g;
  };

  double pooled_prec = prior_prec;
  double pooled_mean_num = 0.0;
  for (int idx : members) {
    pooled_prec += data.item(idx).precision(0, 0);
    pooled_mean_num += data.item(idx).precision_times_mean(0);
  }
  double pooled_mean = pooled_mean_num / pooled_prec;
  double pooled_sd = 1.0 / std::sqrt(pooled_prec);
  double ref = log_f(pooled_mean);

  auto f = [&](double mu) { return std::exp(log_f(mu) - ref); };

  double a = pooled_mean - 12.0 * pooled_sd;
  double b = pooled_mean + 12.0 * pooled_sd;
  double m = pooled_mean;
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson_segment(f, a, fa, b, fb, fm);
  // Scale the absolute tolerance to the crude estimate for ~1e-9 relative.
  double tol = 1e-9 * std::max(std::abs(whole), 1e-30);
  double integral =
      adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 0);
  if (!(integral > 0.0) || !std::isfinite(integral)) {
    throw QuadratureNonConvergence("quadrature_oracle: integral not finite");
  }
  return std::log(integral) + ref;
}

MoveState::MoveState(const Dataset& data, Partition start, const PriorSpec& prior)
    : data_(&data), prior_(&prior), labels_(start.labels()) {
  if (start.size() != data.size()) {
    throw DimensionMismatch("partition length does not match dataset size");
  }
  check_prior_dim(prior, data.dim());
  stats_.assign(start.num_clusters(), ClusterStats::zero(data.dim()));
  for (int i = 0; i < data.size(); ++i) stats_[labels_[i]].add(data.item(i));
  contrib_.resize(stats_.size());
  total_ = 0.0;
  for (std::size_t g = 0; g < stats_.size(); ++g) {
    contrib_[g] = cluster_contribution(stats_[g], prior);
    total_ += contrib_[g];
  }
}

double MoveState::move_delta(int item, int target) const {
  const int from = labels_[item];
  if (target == from) return 0.0;
  const bool singleton = stats_[from].count == 1;
  if (target == kNewCluster && singleton) return 0.0;
  if (target != kNewCluster && (target < 0 || target >= num_clusters())) {
    throw KOutOfRange("move_delta: target cluster out of range");
  }

  const GaussianItem& it = data_->item(item);
  double delta = -contrib_[from];
  if (!singleton) {
    ClusterStats reduced = stats_[from];
    reduced.remove(it);
    delta += cluster_contribution(reduced, *prior_);
  }
  if (target == kNewCluster) {
    ClusterStats fresh = ClusterStats::zero(data_->dim());
    fresh.add(it);
    delta += cluster_contribution(fresh, *prior_);
  } else {
    ClusterStats grown = stats_[target];
    grown.add(it);
    delta += cluster_contribution(grown, *prior_) - contrib_[target];
  }
  return delta;
}

void MoveState::commit(int item, int target) {
  const int from = labels_[item];
  if (target == from) return;
  const bool singleton = stats_[from].count == 1;
  if (target == kNewCluster && singleton) return;

  const GaussianItem& it = data_->item(item);
  int to = target;
  if (target == kNewCluster) {
    to = num_clusters();
    stats_.push_back(ClusterStats::zero(data_->dim()));
    contrib_.push_back(0.0);
  }

  total_ -= contrib_[from] + contrib_[to];
  stats_[from].remove(it);
  stats_[to].add(it);
  labels_[item] = to;
  contrib_[from] = cluster_contribution(stats_[from], *prior_);
  contrib_[to] = cluster_contribution(stats_[to], *prior_);
  total_ += contrib_[from] + contrib_[to];

  if (stats_[from].count == 0) {
    const int last = num_clusters() - 1;
    if (from != last) {
      stats_[from] = std::move(stats_[last]);
      contrib_[from] = contrib_[last];
      for (int& l : labels_) {
        if (l == last) l = from;
      }
    }
    stats_.pop_back();
    contrib_.pop_back();
  }
}

}  // namespace mnclust
