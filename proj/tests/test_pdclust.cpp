#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "tsboost/pdclust.hpp"
#include "tsboost/random.hpp"

using namespace tsboost;
using namespace tsboost::pdclust;

namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double x : v) m(0, j++) = x;
  return m;
}

// Plain product formula, accumulated in reverse order.
Matrix product_oracle(const Matrix& d) {
  Matrix p(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    double total = 0;
    for (Eigen::Index k = d.cols() - 1; k >= 0; --k) {
      double prod = 1;
      for (Eigen::Index h = d.cols() - 1; h >= 0; --h)
        if (h != k) prod *= d(i, h);
      p(i, k) = prod;
      total += prod;
    }
    p.row(i) /= total;
  }
  return p;
}

Matrix random_distances(RandomStream& rng, Eigen::Index n, Eigen::Index k) {
  Matrix d(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) d(i, j) = 0.01 + 10 * rng.uniform();
  return d;
}

}  // namespace

TEST_CASE("probability examples") {
  CHECK(pd_probabilities(row({1, 1})).P.values().isApprox(row({0.5, 0.5})));
  const Matrix zero = pd_probabilities(row({0, 5})).P.values();
  CHECK(zero(0, 0) == 1.0);
  CHECK(zero(0, 1) == 0.0);
  const Matrix three = pd_probabilities(row({1, 2, 4})).P.values();
  CHECK(std::abs(three(0, 0) - 8.0 / 14) < 1e-15);
  CHECK(std::abs(three(0, 1) - 4.0 / 14) < 1e-15);
  CHECK(std::abs(three(0, 2) - 2.0 / 14) < 1e-15);
}

TEST_CASE("several zero distances split the row") {
  const Matrix p = pd_probabilities(row({0, 3, 0, 1})).P.values();
  CHECK(p(0, 0) == 0.5);
  CHECK(p(0, 2) == 0.5);
  CHECK(p(0, 1) == 0.0);
  CHECK(pd_probabilities(row({0, 0, 0})).P.values().isApprox(row({1. / 3, 1. / 3, 1. / 3})));
}

TEST_CASE("negative or non-finite distances are rejected") {
  CHECK_THROWS_AS(pd_probabilities(row({1, -1})), Error);
  CHECK_THROWS_AS(pd_probabilities(row({1, std::nan("")})), Error);
  try {
    pd_probabilities(row({2, -0.5}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDistance);
  }
}

TEST_CASE("matches the product oracle on random matrices") {
  RandomStream rng(17);
  for (int t = 0; t < 100; ++t) {
    const Matrix d = random_distances(rng, 20, 4);
    const auto model = pd_probabilities(d);
    CHECK((model.P.values() - product_oracle(d)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(model.distances == d);
  }
}

TEST_CASE("P times d is constant in each row") {
  RandomStream rng(18);
  for (int t = 0; t < 100; ++t) {
    const Matrix d = random_distances(rng, 1 + rng.below(20), 2 + rng.below(4));
    const Matrix p = pd_probabilities(d).P.values();
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const Eigen::ArrayXd pd = p.row(i).array() * d.row(i).array();
      CHECK((pd.maxCoeff() - pd.minCoeff()) / pd.maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("scale invariance and ordering") {
  RandomStream rng(19);
  for (int t = 0; t < 100; ++t) {
    const Matrix d = random_distances(rng, 5, 4);
    const Matrix p = pd_probabilities(d).P.values();
    Matrix scaled = d;
    scaled.row(2) *= 1e-3 + 1e3 * rng.uniform();
    const Matrix q = pd_probabilities(scaled).P.values();
    CHECK((p.row(2) - q.row(2)).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      std::vector<int> by_d(4), by_p(4);
      std::iota(by_d.begin(), by_d.end(), 0);
      std::iota(by_p.begin(), by_p.end(), 0);
      std::sort(by_d.begin(), by_d.end(), [&](int a, int b) { return d(i, a) < d(i, b); });
      std::sort(by_p.begin(), by_p.end(), [&](int a, int b) { return p(i, a) > p(i, b); });
      CHECK(by_d == by_p);
    }
  }
}

TEST_CASE("extreme magnitudes stay finite") {
  const Matrix p = pd_probabilities(row({1e-200, 1e-180, 1e-190, 1e-170, 1e-160})).P.values();
  CHECK(p.allFinite());
  CHECK(std::abs(p.sum() - 1) < 1e-12);
  const Matrix q = pd_probabilities(row({1e200, 1e250, 1e300})).P.values();
  CHECK(q.allFinite());
  CHECK(q(0, 0) > 0.999);
}

TEST_CASE("BC index and beta") {
  const MembershipMatrix onehot(Matrix::Identity(4, 4));
  CHECK(bc_index(onehot) == 0.0);
  CHECK(loss_beta(onehot) == 0.0);

  const MembershipMatrix uniform(Matrix::Constant(5, 3, 1.0 / 3));
  CHECK(std::abs(bc_index(uniform) - 1) < 1e-12);
  CHECK(std::abs(loss_beta(uniform) - 5) < 1e-12);

  Matrix hand(2, 2);
  hand << 0.5, 0.5, 1, 0;
  CHECK(bc_index(MembershipMatrix(hand)) == doctest::Approx(0.5));

  RandomStream rng(20);
  for (int t = 0; t < 100; ++t) {
    const auto model = pd_probabilities(random_distances(rng, 1 + rng.below(30), 2 + rng.below(5)));
    const double bc = bc_index(model);
    CHECK(bc >= 0.0);
    CHECK(bc <= 1.0 + 1e-12);
    CHECK(std::abs(loss_beta(model) - double(model.P.series()) * bc) < 1e-12);
  }
}
