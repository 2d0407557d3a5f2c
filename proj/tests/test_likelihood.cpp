#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mnclust/likelihood.hpp"
#include "support.hpp"

using namespace mnclust;
using testsupport::all_partitions;
using testsupport::brute_force_total;
using testsupport::random_dataset;
using testsupport::random_spd;
using testsupport::random_vec;

namespace {

Dataset dataset_1d(const std::vector<double>& means,
                   const std::vector<double>& vars) {
  std::vector<GaussianItem> items;
  for (std::size_t i = 0; i < means.size(); ++i) {
    items.push_back(GaussianItem::from_covariance(
        "i" + std::to_string(i), Vec::Constant(1, means[i]),
        Mat::Constant(1, 1, vars[i])));
  }
  return Dataset(std::move(items));
}

}  // namespace

TEST_CASE("fit quadform: singleton is zero, hand pair is two") {
  Dataset data = dataset_1d({0, 2}, {1, 1});
  PriorSpec flat = PriorSpec::flat();
  CHECK(cluster_fit_quadform(cluster_stats(data, {0}), flat) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cluster_fit_quadform(cluster_stats(data, {0, 1}), flat) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fit quadform: nearly-flat normal prior matches flat") {
  RandomStream rng(21);
  Dataset data = random_dataset(5, 3, rng);
  ClusterStats stats = cluster_stats(data, {0, 1, 2, 3, 4});
  PriorSpec nearly_flat =
      PriorSpec::normal(SpdMatrix(1e-12 * Mat::Identity(3, 3)));
  CHECK(cluster_fit_quadform(stats, nearly_flat) ==
        doctest::Approx(cluster_fit_quadform(stats, PriorSpec::flat()))
            .epsilon(1e-6));
}

TEST_CASE("fit pairwise: singleton zero, hand pair, order invariance") {
  Dataset data = dataset_1d({0, 2}, {1, 1});
  PriorSpec flat = PriorSpec::flat();
  CHECK(cluster_fit_pairwise(data, {0}, flat) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cluster_fit_pairwise(data, {0, 1}, flat) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cluster_fit_pairwise(data, {1, 0}, flat) ==
        doctest::Approx(cluster_fit_pairwise(data, {0, 1}, flat))
            .epsilon(1e-12));
}

TEST_CASE("pairwise equals quadform across random clusters and priors") {
  RandomStream rng(22);
  for (int rep = 0; rep < 60; ++rep) {
    int dim = 1 + static_cast<int>(rng.uniform_int(8));
    int size = 1 + static_cast<int>(rng.uniform_int(10));
    Dataset data = random_dataset(size, dim, rng);
    std::vector<int> members(size);
    std::iota(members.begin(), members.end(), 0);

    PriorSpec flat = PriorSpec::flat();
    double qf = cluster_fit_quadform(cluster_stats(data, members), flat);
    double pw = cluster_fit_pairwise(data, members, flat);
    CHECK(pw == doctest::Approx(qf).epsilon(1e-8));
    CHECK(qf >= -1e-10);

    PriorSpec normal = PriorSpec::isotropic_normal(dim, 2.0);
    double qf_n = cluster_fit_quadform(cluster_stats(data, members), normal);
    double shrink = 0.0;
    double pw_n = cluster_fit_pairwise(data, members, normal, &shrink);
    CHECK(pw_n + shrink == doctest::Approx(qf_n).epsilon(1e-8));
    CHECK(shrink >= -1e-10);
  }
}

TEST_CASE("flat all-singletons total is exactly zero") {
  RandomStream rng(23);
  Dataset data = random_dataset(12, 4, rng);
  LikelihoodBreakdown b =
      log_likelihood(data, Partition::all_singletons(12), PriorSpec::flat());
  CHECK(std::abs(b.total) < 1e-10);
  CHECK(std::abs(b.fit_term) < 1e-10);
  CHECK(b.prior_norm_term == 0.0);
  CHECK(b.shrink_term == 0.0);
}

TEST_CASE("hand-evaluated two-item total") {
  Dataset data = dataset_1d({0, 0}, {1, 1});
  LikelihoodBreakdown b =
      log_likelihood(data, Partition::single_cluster(2), PriorSpec::flat());
  double expected = -std::log(2.0 * std::acos(-1.0)) +
                    0.5 * std::log(std::acos(-1.0));
  CHECK(b.total == doctest::Approx(expected).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(-1.265512).epsilon(1e-6));
}

TEST_CASE("breakdown terms sum to total and have the right signs") {
  RandomStream rng(24);
  Dataset data = random_dataset(10, 2, rng);
  for (const PriorSpec& prior :
       {PriorSpec::flat(), PriorSpec::isotropic_normal(2, 1.0)}) {
    Partition p = Partition::from_labels({0, 1, 2, 0, 1, 2, 0, 1, 2, 0});
    LikelihoodBreakdown b = log_likelihood(data, p, prior);
    CHECK(b.total == doctest::Approx(b.data_term + b.prior_norm_term +
                                     b.complexity_term + b.fit_term +
                                     b.shrink_term)
                         .epsilon(1e-12));
    CHECK(b.fit_term <= 1e-10);
    CHECK(b.shrink_term <= 1e-10);
  }
}

TEST_CASE("totals match the explicit-inverse oracle on every partition") {
  RandomStream rng(25);
  Dataset data = random_dataset(5, 2, rng);
  PriorSpec flat = PriorSpec::flat();
  PriorSpec normal = PriorSpec::isotropic_normal(2, 0.7);
  for (const auto& labels : all_partitions(5)) {
    Partition p = Partition::from_labels(labels);
    CHECK(log_likelihood(data, p, flat).total ==
          doctest::Approx(brute_force_total(data, p, flat)).epsilon(1e-9));
    CHECK(log_likelihood(data, p, normal).total ==
          doctest::Approx(brute_force_total(data, p, normal)).epsilon(1e-9));
  }
}

TEST_CASE("label and item-order invariance") {
  RandomStream rng(26);
  Dataset data = random_dataset(8, 3, rng);
  Partition p = Partition::from_labels({0, 1, 2, 0, 1, 2, 0, 1});
  Partition relabeled = Partition::from_labels({2, 0, 1, 2, 0, 1, 2, 0});
  PriorSpec normal = PriorSpec::isotropic_normal(3, 1.5);
  for (const PriorSpec& prior : {PriorSpec::flat(), normal}) {
    CHECK(log_likelihood(data, p, prior).total ==
          doctest::Approx(log_likelihood(data, relabeled, prior).total)
              .epsilon(1e-12));
  }

  // Reorder items (and labels with them): totals unchanged.
  std::vector<int> order = {3, 1, 7, 0, 6, 2, 5, 4};
  std::vector<GaussianItem> reordered;
  std::vector<int> labels;
  for (int i : order) {
    reordered.push_back(data.item(i));
    labels.push_back(p.label(i));
  }
  Dataset shuffled(std::move(reordered));
  Partition sp = Partition::compacted(labels);
  CHECK(log_likelihood(shuffled, sp, PriorSpec::flat()).total ==
        doctest::Approx(log_likelihood(data, p, PriorSpec::flat()).total)
            .epsilon(1e-12));
}

TEST_CASE("flat totals are translation invariant, term by term") {
  RandomStream rng(27);
  Dataset data = random_dataset(7, 2, rng);
  Vec shift(2);
  shift << 13.5, -4.25;
  std::vector<GaussianItem> shifted;
  for (const auto& it : data.items()) {
    shifted.push_back(GaussianItem::from_precision(it.id, it.mean + shift,
                                                   it.precision));
  }
  Dataset moved(std::move(shifted));
  Partition p = Partition::from_labels({0, 0, 1, 1, 1, 2, 2});
  LikelihoodBreakdown a = log_likelihood(data, p, PriorSpec::flat());
  LikelihoodBreakdown b = log_likelihood(moved, p, PriorSpec::flat());
  CHECK(a.total == doctest::Approx(b.total).epsilon(1e-10));
  CHECK(a.fit_term == doctest::Approx(b.fit_term).epsilon(1e-10));
  CHECK(a.complexity_term == doctest::Approx(b.complexity_term).epsilon(1e-12));
}

TEST_CASE("linear maps shift the flat total by (m - n) log|det A|") {
  RandomStream rng(28);
  Dataset data = random_dataset(6, 2, rng);
  Mat a(2, 2);
  a << 2, 1, 0.5, 3;  // invertible, det 5.5
  Mat a_inv = a.inverse();
  std::vector<GaussianItem> mapped;
  for (const auto& it : data.items()) {
    Mat gamma = a_inv.transpose() * it.precision * a_inv;
    mapped.push_back(GaussianItem::from_precision(
        it.id, a * it.mean, 0.5 * (gamma + gamma.transpose())));
  }
  Dataset image(std::move(mapped));
  for (const auto& labels :
       {std::vector<int>{0, 0, 0, 0, 0, 0}, std::vector<int>{0, 1, 0, 1, 2, 2}}) {
    Partition p = Partition::from_labels(labels);
    double before = log_likelihood(data, p, PriorSpec::flat()).total;
    double after = log_likelihood(image, p, PriorSpec::flat()).total;
    double expected =
        (p.num_clusters() - data.size()) * std::log(std::abs(a.determinant()));
    CHECK(after - before == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("sigma0 -> infinity: normal total minus prior norm approaches flat") {
  RandomStream rng(29);
  Dataset data = random_dataset(20, 3, rng);
  Partition p = Partition::from_labels(
      {0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1, 2, 3, 4});
  double flat_total = log_likelihood(data, p, PriorSpec::flat()).total;
  LikelihoodBreakdown wide =
      log_likelihood(data, p, PriorSpec::isotropic_normal(3, 1e8));
  CHECK(std::abs((wide.total - wide.prior_norm_term) - flat_total) < 1e-3);
}

TEST_CASE("sigma -> 0: scaled fit term approaches within-group sum of squares") {
  RandomStream rng(30);
  const double sigma2 = 1e-6;
  std::vector<GaussianItem> items;
  for (int i = 0; i < 9; ++i) {
    items.push_back(GaussianItem::from_covariance(
        "i" + std::to_string(i), random_vec(2, rng),
        sigma2 * Mat::Identity(2, 2)));
  }
  Dataset data(std::move(items));
  Partition p = Partition::from_labels({0, 0, 0, 1, 1, 1, 2, 2, 2});
  double fit = log_likelihood(data, p, PriorSpec::flat()).fit_term;
  double wss = within_group_ss(data, p);
  CHECK(sigma2 * fit == doctest::Approx(-0.5 * wss).epsilon(1e-3));
}

TEST_CASE("within_group_ss hand values") {
  Dataset same = dataset_1d({3, 3, 3}, {1, 1, 1});
  CHECK(within_group_ss(same, Partition::single_cluster(3)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  Dataset pair = dataset_1d({0, 2}, {1, 1});
  CHECK(within_group_ss(pair, Partition::single_cluster(2)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quadrature oracle agrees with closed forms") {
  Dataset data = dataset_1d({0, 2, 1}, {1, 1, 0.5});
  PriorSpec flat = PriorSpec::flat();
  PriorSpec normal = PriorSpec::isotropic_normal(1, 1.0);

  auto contribution = [&](const std::vector<int>& members,
                          const PriorSpec& prior) {
    return cluster_contribution(cluster_stats(data, members), prior);
  };

  CHECK(quadrature_oracle(data, {0}, flat) ==
        doctest::Approx(contribution({0}, flat)).epsilon(1e-8));
  CHECK(quadrature_oracle(data, {0, 1}, flat) ==
        doctest::Approx(contribution({0, 1}, flat)).epsilon(1e-8));
  CHECK(quadrature_oracle(data, {0, 1}, normal) ==
        doctest::Approx(contribution({0, 1}, normal)).epsilon(1e-8));
  CHECK(quadrature_oracle(data, {0, 1, 2}, normal) ==
        doctest::Approx(contribution({0, 1, 2}, normal)).epsilon(1e-8));
}

TEST_CASE("quadrature oracle on random 1-D clusters, both priors") {
  RandomStream rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    int size = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<double> means, vars;
    for (int i = 0; i < size; ++i) {
      means.push_back(0.1 + 9.9 * rng.uniform() - 5.0);
      vars.push_back(0.1 + 9.9 * rng.uniform());
    }
    Dataset data = dataset_1d(means, vars);
    std::vector<int> members(size);
    std::iota(members.begin(), members.end(), 0);
    for (double s02 : {0.5, 1.0, 5.0}) {
      PriorSpec prior = PriorSpec::isotropic_normal(1, s02);
      CHECK(quadrature_oracle(data, members, prior) ==
            doctest::Approx(
                cluster_contribution(cluster_stats(data, members), prior))
                .epsilon(1e-6));
    }
    CHECK(quadrature_oracle(data, members, PriorSpec::flat()) ==
          doctest::Approx(cluster_contribution(cluster_stats(data, members),
                                               PriorSpec::flat()))
              .epsilon(1e-6));
  }
}

TEST_CASE("move_delta: identity move, reversibility, scratch recompute") {
  RandomStream rng(32);
  Dataset data = random_dataset(12, 2, rng);
  PriorSpec prior = PriorSpec::isotropic_normal(2, 1.0);
  Partition start = Partition::from_labels({0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3});
  MoveState state(data, start, prior);

  CHECK(state.move_delta(0, state.cluster_of(0)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  double out = state.move_delta(0, 1);
  state.commit(0, 1);
  double back = state.move_delta(0, 0);
  state.commit(0, 0);
  CHECK(out + back == doctest::Approx(0.0).epsilon(1e-10));

  for (int step = 0; step < 100; ++step) {
    int item = static_cast<int>(rng.uniform_int(12));
    int m = state.num_clusters();
    int target;
    do {
      target = static_cast<int>(rng.uniform_int(m + 1));
    } while (target == state.cluster_of(item) ||
             (target == m && state.cluster_size(state.cluster_of(item)) == 1));
    bool to_new = target == m;
    double before = log_likelihood(data, state.partition(), prior).total;
    double delta = state.move_delta(item, to_new ? MoveState::kNewCluster : target);
    state.commit(item, to_new ? MoveState::kNewCluster : target);
    double after = log_likelihood(data, state.partition(), prior).total;
    CHECK(delta == doctest::Approx(after - before).epsilon(1e-8));
    CHECK(state.total() == doctest::Approx(after).epsilon(1e-8));
  }
}

TEST_CASE("move to a new cluster then back is a no-op") {
  RandomStream rng(33);
  Dataset data = random_dataset(6, 2, rng);
  MoveState state(data, Partition::from_labels({0, 0, 0, 1, 1, 1}),
                  PriorSpec::flat());
  double t0 = state.total();
  double d1 = state.move_delta(2, MoveState::kNewCluster);
  state.commit(2, MoveState::kNewCluster);
  CHECK(state.num_clusters() == 3);
  double d2 = state.move_delta(2, 0);
  state.commit(2, 0);
  CHECK(state.num_clusters() == 2);
  CHECK(d1 + d2 == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(state.total() == doctest::Approx(t0).epsilon(1e-10));
}
