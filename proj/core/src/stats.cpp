#include "mnclust/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mnclust {

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw ConfigError("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace

double chisq_sf(double x, long dof) {
  if (x < 0.0) throw ConfigError("chisq_sf: x must be nonnegative");
  if (dof < 0) throw ConfigError("chisq_sf: dof must be nonnegative");
  if (dof == 0) return x == 0.0 ? 1.0 : 0.0;
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

std::vector<double> fdr_adjust(const std::vector<double>& p_values) {
  const std::size_t n = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("fdr_adjust: p-values must lie in [0, 1]");
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<double> out(n);
  double running = 1.0;
  for (std::size_t r = n; r-- > 0;) {
    double scaled = p_values[order[r]] * static_cast<double>(n) /
                    static_cast<double>(r + 1);
    running = std::min(running, scaled);
    out[order[r]] = running;
  }
  return out;
}

EqualMeansTester::EqualMeansTester(const Dataset& data) : data_(&data) {
  covariances_.reserve(data.size());
  for (const auto& item : data.items()) covariances_.push_back(item.covariance());
}

double EqualMeansTester::pair_term(int i, int j) {
  if (i > j) std::swap(i, j);
  long long key = static_cast<long long>(i) * data_->size() + j;
  auto it = pair_terms_.find(key);
  if (it != pair_terms_.end()) return it->second;
  Vec d = data_->item(i).mean - data_->item(j).mean;
  CholeskyFactor f = CholeskyFactor::compute(covariances_[i] + covariances_[j]);
  double term = f.quad_form(d, d);
  pair_terms_.emplace(key, term);
  return term;
}

ChiSqResult EqualMeansTester::test(const Partition& partition) {
  if (partition.size() != data_->size()) {
    throw DimensionMismatch("partition length does not match dataset size");
  }
  double statistic = 0.0;
  long pairs = 0;
  for (const auto& members : partition.clusters()) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        statistic += pair_term(members[a], members[b]);
        ++pairs;
      }
    }
  }
  long dof = pairs * data_->dim();
  return ChiSqResult{statistic, dof, chisq_sf(statistic, dof)};
}

ChiSqResult equal_means_chisq(const Dataset& data, const Partition& partition) {
  EqualMeansTester tester(data);
  return tester.test(partition);
}

SelectionReport select_k(const Dataset& data,
                         const std::map<int, Partition>& partitions_by_k,
                         const std::optional<PriorSpec>& normal_prior,
                         double alpha) {
  if (partitions_by_k.empty()) {
    throw ConfigError("select_k: no candidate partitions");
  }
  SelectionReport report;
  report.alpha = alpha;
  EqualMeansTester tester(data);
  PriorSpec flat = PriorSpec::flat();

  for (const auto& [k, partition] : partitions_by_k) {
    if (partition.num_clusters() != k) {
      throw ConfigError("select_k: partition cluster count does not match key");
    }
    SelectionRow row;
    row.k = k;
    row.partition = partition;
    row.loglik_flat = log_likelihood(data, partition, flat).total;
    if (normal_prior) {
      row.loglik_normal = log_likelihood(data, partition, *normal_prior).total;
    }
    ChiSqResult chi = tester.test(partition);
    row.chisq = chi.statistic;
    row.dof = chi.dof;
    row.p_value = chi.p_value;
    report.rows.push_back(std::move(row));
  }

  const auto& rows = report.rows;
  report.best_k_flat = rows.front().k;
  double best_flat = rows.front().loglik_flat;
  double best_normal = -std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.loglik_flat > best_flat) {
      best_flat = row.loglik_flat;
      report.best_k_flat = row.k;
    }
    if (row.loglik_normal && *row.loglik_normal > best_normal) {
      best_normal = *row.loglik_normal;
      report.best_k_normal = row.k;
    }
    if (!report.fewest_k_significant && row.p_value >= alpha) {
      report.fewest_k_significant = row.k;
    }
  }
  return report;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("adjusted_rand_index: partition sizes differ");
  }
  const int n = a.size();
  const int ma = a.num_clusters();
  const int mb = b.num_clusters();
  std::vector<std::vector<long>> table(ma, std::vector<long>(mb, 0));
  for (int i = 0; i < n; ++i) ++table[a.label(i)][b.label(i)];

  auto choose2 = [](long x) { return x * (x - 1) / 2.0; };
  double sum_cells = 0.0;
  std::vector<long> row_sum(ma, 0), col_sum(mb, 0);
  for (int i = 0; i < ma; ++i) {
    for (int j = 0; j < mb; ++j) {
      sum_cells += choose2(table[i][j]);
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
    }
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (long r : row_sum) sum_rows += choose2(r);
  for (long c : col_sum) sum_cols += choose2(c);
  double total = choose2(n);
  double expected = sum_rows * sum_cols / total;
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

}  // namespace mnclust
