#include <cmath>

#include "doctest.h"
#include "tsboost/eval.hpp"
#include "tsboost/random.hpp"
#include "tsboost/simgen.hpp"

using namespace tsboost;
using namespace tsboost::eval;

namespace {

std::vector<int> random_labels(RandomStream& rng, std::size_t n, int k) {
  std::vector<int> l(n);
  for (auto& v : l) v = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return l;
}

// Rand index by explicit enumeration of unordered pairs.
double rand_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t agree = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++pairs;
      agree += (a[i] == a[j]) == (b[i] == b[j]);
    }
  return double(agree) / double(pairs);
}

MembershipMatrix random_fuzzy(RandomStream& rng, std::size_t n, std::size_t k) {
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.exponential();
    m.row(i) /= m.row(i).sum();
  }
  return MembershipMatrix(m);
}

}  // namespace

TEST_CASE("fuzzy equivalence") {
  const std::vector<double> a{0.2, 0.8}, onehot1{1, 0}, onehot2{0, 1}, half{0.5, 0.5};
  CHECK(fuzzy_equivalence(a, a) == 1.0);
  CHECK(fuzzy_equivalence(onehot1, onehot2) == 0.0);
  CHECK(fuzzy_equivalence(half, onehot1) == 0.5);
  CHECK_THROWS_AS(fuzzy_equivalence(a, std::vector<double>{1, 0, 0}), Error);
}

TEST_CASE("fuzzy Rand hand case") {
  Matrix p(3, 2), q(3, 2);
  p << 1, 0, 1, 0, 0, 1;
  q << 1, 0, 0, 1, 0, 1;
  CHECK(fuzzy_rand(MembershipMatrix(p), MembershipMatrix(q)) == doctest::Approx(1.0 / 3));
}

TEST_CASE("fuzzy Rand properties") {
  RandomStream rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_fuzzy(rng, 10, 3), q = random_fuzzy(rng, 10, 4);
    CHECK(fuzzy_rand(p, p) == 1.0);
    CHECK(fuzzy_rand(p, q) == fuzzy_rand(q, p));
    CHECK(fuzzy_rand(p, q) >= 0.0);
    CHECK(fuzzy_rand(p, q) <= 1.0);
  }
  CHECK_THROWS_AS(fuzzy_rand(random_fuzzy(rng, 4, 2), random_fuzzy(rng, 5, 2)), Error);
}

TEST_CASE("crisp partitions reduce to the Rand index") {
  RandomStream rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(11);
    const auto a = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
    const auto b = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
    const double oracle = rand_oracle(a, b);
    CHECK(std::abs(fuzzy_rand(crisp_partition(a), crisp_partition(b)) - oracle) < 1e-12);
    CHECK(std::abs(classic_rand(a, b) - oracle) < 1e-12);
  }
}

TEST_CASE("classic Rand") {
  const std::vector<int> a{1, 1, 2}, b{1, 2, 2};
  CHECK(classic_rand(a, a) == 1.0);
  CHECK(classic_rand(a, b) == doctest::Approx(1.0 / 3));
  const std::vector<int> relabeled{3, 3, 1};
  CHECK(classic_rand(relabeled, b) == classic_rand(a, b));
}

TEST_CASE("confusion matrix and purity") {
  const std::vector<int> truth{1, 1, 2, 2, 3, 3};
  const std::vector<int> perfect{2, 2, 3, 3, 1, 1};
  const auto cm = confusion_matrix(truth, perfect);
  CHECK(cm.truth_labels == std::vector<int>{1, 2, 3});
  CHECK(cm.predicted_labels == std::vector<int>{1, 2, 3});
  CHECK(cm.counts[0] == std::vector<std::size_t>{0, 2, 0});
  CHECK(cm.counts[2] == std::vector<std::size_t>{2, 0, 0});
  CHECK(cm.total() == 6);
  CHECK(purity(truth, perfect) == 1.0);

  const std::vector<int> merged{1, 1, 1, 1, 2, 2};
  CHECK(purity(truth, merged) == doctest::Approx(4.0 / 6));
  CHECK_THROWS_AS(confusion_matrix(truth, std::vector<int>{1}), Error);
}

TEST_CASE("reference partition of spline-space singletons is near crisp") {
  // A grid of vanishing lambdas makes each singleton center reproduce its series.
  pspline::SmootherSettings settings;
  settings.criterion.grid = pspline::log_grid(1e-12, 1e-9, 10);
  Dataset d;
  for (int j = 0; j < 12; ++j) d.domain.push_back(j / 11.0);
  const auto basis = pspline::build_basis(d.domain);
  RandomStream rng(3);
  std::vector<int> labels;
  for (int i = 0; i < 4; ++i) {
    Vector a(static_cast<Eigen::Index>(basis.size()));
    for (auto& v : a) v = 3 * rng.normal();
    const Vector y = basis.B * a;
    d.series.push_back({"s" + std::to_string(i), std::vector<double>(y.data(), y.data() + y.size())});
    labels.push_back(i + 1);
  }
  const auto ref = reference_partition(d, labels, distance::DistanceKind::Euclidean, settings);
  for (int i = 0; i < 4; ++i) CHECK(ref.model.P(i, i) > 0.95);

  const auto again = pdclust::pd_probabilities(distance::distance_matrix(d, ref.centers, distance::DistanceKind::Euclidean));
  CHECK(again.P.values() == ref.model.P.values());
}

TEST_CASE("reference BC of the simulated benchmark") {
  const auto sim = simgen::generate({});
  const auto ref = reference_partition(sim.data, sim.labels, distance::DistanceKind::PenroseShape, {});
  CHECK(ref.labels == std::vector<int>{1, 2, 3, 4, 5, 6});
  const double bc = pdclust::bc_index(ref.model);
  MESSAGE("reference BC " << bc);
  CHECK(std::abs(bc - 0.1977) <= 0.05);
}
