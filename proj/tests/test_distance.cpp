#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "tsboost/distance.hpp"
#include "tsboost/random.hpp"

using namespace tsboost;
using namespace tsboost::distance;

namespace {

std::vector<double> noise(RandomStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Independent complex-arithmetic DFT.
std::vector<double> dft_oracle(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> out;
  for (std::size_t j = 1; j <= n / 2; ++j) {
    std::complex<double> s = 0;
    for (std::size_t t = 0; t < n; ++t)
      s += y[t] * std::polar(1.0, -2 * std::numbers::pi * double(j) * double(t) / double(n));
    out.push_back(std::norm(s) / double(n));
  }
  return out;
}

double euclid_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double penrose_oracle(const std::vector<double>& y, const std::vector<double>& c) {
  const double n = double(y.size());
  double d2 = 0, sy = 0, sc = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    d2 += (y[j] - c[j]) * (y[j] - c[j]);
    sy += y[j];
    sc += c[j];
  }
  d2 /= n;
  const double q2 = (sy - sc) * (sy - sc) / (n * n);
  return std::sqrt(std::max(0.0, n / (n - 1) * (d2 - q2)));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("euclidean") {
  CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == 5.0);
  RandomStream rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto a = noise(rng, 13), b = noise(rng, 13);
    CHECK(euclidean(a, a) == 0.0);
    CHECK(std::abs(euclidean(a, b) - euclid_oracle(a, b)) < 1e-12);
  }
  CHECK(code_of([] { euclidean(std::vector<double>{1, 2}, std::vector<double>{1}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("penrose shape distance") {
  CHECK(penrose_shape(std::vector<double>{0, 0}, std::vector<double>{0, 2}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const std::vector<double> c{1, 4, 2, 8, 5};
  std::vector<double> shifted = c;
  for (auto& x : shifted) x += 3.25;
  CHECK(penrose_shape(shifted, c) < 1e-12);
  CHECK(penrose_shape(c, c) == 0.0);

  RandomStream rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto a = noise(rng, 10), b = noise(rng, 10);
    CHECK(std::abs(penrose_shape(a, b) - penrose_oracle(a, b)) < 1e-12);
    auto a2 = a;
    const double off = 10 * rng.normal();
    for (auto& x : a2) x += off;
    CHECK(std::abs(penrose_shape(a2, b) - penrose_shape(a, b)) < 1e-9);
  }
  CHECK(code_of([] { penrose_shape(std::vector<double>{1}, std::vector<double>{2}); }) ==
        ErrorCode::SeriesTooShort);
}

TEST_CASE("periodogram ordinates") {
  const std::vector<double> constant(12, 3.7);
  for (double v : periodogram(constant)) CHECK(std::abs(v) < 1e-10);

  std::vector<double> tone(16);
  for (std::size_t t = 0; t < 16; ++t) tone[t] = std::cos(2 * std::numbers::pi * double(t) / 16);
  const auto p = periodogram(tone);
  REQUIRE(p.size() == 8);
  CHECK(p[0] == doctest::Approx(4.0));
  for (std::size_t j = 1; j < p.size(); ++j) CHECK(p[j] < 1e-10 * p[0]);

  RandomStream rng(3);
  for (std::size_t n : {4u, 5u, 10u, 16u, 17u, 32u, 64u}) {
    const auto y = noise(rng, n);
    const auto oracle = dft_oracle(y);
    const auto fast = periodogram(y), direct = periodogram_direct(y);
    REQUIRE(fast.size() == oracle.size());
    for (std::size_t j = 0; j < oracle.size(); ++j) {
      CHECK(std::abs(fast[j] - oracle[j]) < 1e-10);
      CHECK(std::abs(direct[j] - oracle[j]) < 1e-10);
    }
  }
  CHECK(code_of([] { periodogram(std::vector<double>{1, 2, 3}); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("parseval for even n") {
  RandomStream rng(4);
  for (std::size_t n : {8u, 10u, 16u, 24u}) {
    const auto y = noise(rng, n);
    double mean = 0;
    for (double v : y) mean += v;
    mean /= double(n);
    double ss = 0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const auto p = periodogram(y);
    // Ordinates 1..n/2-1 appear twice in the full spectrum, Nyquist once.
    double total = p.back();
    for (std::size_t j = 0; j + 1 < p.size(); ++j) total += 2 * p[j];
    CHECK(std::abs(total - ss) < 1e-8);
  }
}

TEST_CASE("periodogram distance") {
  RandomStream rng(5);
  const auto y = noise(rng, 16);
  CHECK(periodogram_distance(y, y) == 0.0);
  auto lifted = y;
  for (auto& v : lifted) v += 5;
  CHECK(periodogram_distance(y, lifted) < 1e-9);

  std::vector<double> a(16), b(16);
  for (std::size_t t = 0; t < 16; ++t) {
    a[t] = std::cos(2 * std::numbers::pi * 1 * double(t) / 16);
    b[t] = std::cos(2 * std::numbers::pi * 3 * double(t) / 16);
  }
  CHECK(periodogram_distance(a, b) == doctest::Approx(std::sqrt(2.0) * 16 / 4));

  for (int t = 0; t < 20; ++t) {
    const auto u = noise(rng, 12), v = noise(rng, 12);
    std::vector<double> rotated(12);
    const std::size_t s = 1 + rng.below(11);
    for (std::size_t i = 0; i < 12; ++i) rotated[(i + s) % 12] = u[i];
    CHECK(std::abs(periodogram_distance(rotated, v) - periodogram_distance(u, v)) < 1e-9);
  }
}

TEST_CASE("metric basics for all kinds") {
  RandomStream rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto a = noise(rng, 10), b = noise(rng, 10);
    for (auto f : {euclidean, penrose_shape, periodogram_distance}) {
      CHECK(f(a, b) >= 0.0);
      CHECK(f(a, b) == doctest::Approx(f(b, a)).epsilon(1e-14));
      CHECK(f(a, a) < 1e-12);
    }
  }
}

TEST_CASE("distance matrix") {
  Dataset d;
  d.domain = {0, 1, 2, 3};
  d.series = {{"a", {1, 0, 0, 0}}, {"b", {0, 1, 0, 0}}, {"c", {0, 0, 1, 0}}};
  Matrix centers(2, 4);
  centers << 1, 0, 0, 0, 0, 0, 0, 1;
  const Matrix e = distance_matrix(d, centers, DistanceKind::Euclidean);
  CHECK(e(0, 0) == 0.0);
  CHECK(e(0, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(e(1, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(e(2, 1) == doctest::Approx(std::sqrt(2.0)));

  RandomStream rng(7);
  Dataset r;
  for (int j = 0; j < 8; ++j) r.domain.push_back(j);
  for (int i = 0; i < 5; ++i) r.series.push_back({"x", noise(rng, 8)});
  Matrix c(3, 8);
  for (Eigen::Index k = 0; k < 3; ++k)
    for (Eigen::Index j = 0; j < 8; ++j) c(k, j) = rng.normal();
  for (auto kind : {DistanceKind::Euclidean, DistanceKind::PenroseShape, DistanceKind::Periodogram}) {
    const Matrix m = distance_matrix(r, c, kind);
    REQUIRE(m.rows() == 5);
    REQUIRE(m.cols() == 3);
    for (int i = 0; i < 5; ++i)
      for (int k = 0; k < 3; ++k) {
        std::vector<double> ck(8);
        for (int j = 0; j < 8; ++j) ck[j] = c(k, j);
        const auto& y = r.series[i].values;
        const double want = kind == DistanceKind::Euclidean      ? euclidean(y, ck)
                            : kind == DistanceKind::PenroseShape ? penrose_shape(y, ck)
                                                                 : periodogram_distance(y, ck);
        CHECK(std::abs(m(i, k) - want) < 1e-12);
      }
  }
}

TEST_CASE("distance names") {
  CHECK(parse_kind("penrose") == DistanceKind::PenroseShape);
  CHECK(parse_kind("periodogram") == DistanceKind::Periodogram);
  CHECK(to_string(DistanceKind::Euclidean) == "euclidean");
  CHECK(code_of([] { parse_kind("manhattan"); }) == ErrorCode::ConfigError);
}
