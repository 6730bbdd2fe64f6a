#include "tsboost/distance.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace tsboost::distance {
namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "series lengths differ (" + std::to_string(a.size()) +
                                               " vs " + std::to_string(b.size()) + ")");
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT, X_k = sum_{t=0}^{n-1} x_t exp(-2 pi i k t / n).
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const auto u = a[start + k];
        const auto v = a[start + k + len / 2] * w;
        a[start + k] = u + v;
        a[start + k + len / 2] = u - v;
      }
    }
  }
}

double spectrum_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

}  // namespace

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Euclidean: return "euclidean";
    case DistanceKind::PenroseShape: return "penrose";
    case DistanceKind::Periodogram: return "periodogram";
  }
  return "unknown";
}

DistanceKind parse_kind(std::string_view name) {
  for (DistanceKind k :
       {DistanceKind::Euclidean, DistanceKind::PenroseShape, DistanceKind::Periodogram})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::ConfigError, "unknown distance '" + std::string(name) + "'");
}

double euclidean(std::span<const double> y, std::span<const double> c) {
  check_lengths(y, c);
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) s += (y[j] - c[j]) * (y[j] - c[j]);
  return std::sqrt(s);
}

double penrose_shape(std::span<const double> y, std::span<const double> c) {
  check_lengths(y, c);
  const std::size_t n = y.size();
  if (n < 2) throw Error(ErrorCode::SeriesTooShort, "Penrose distance needs n >= 2");
  // dbar^2 - q^2 is the population variance of the differences; the centered
  // two-pass form keeps it nonnegative up to rounding.
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) mean += y[j] - c[j];
  mean /= static_cast<double>(n);
  double radicand = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = y[j] - c[j] - mean;
    radicand += e * e;
  }
  radicand /= static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return std::sqrt(nn / (nn - 1.0) * radicand);
}

std::vector<double> periodogram_direct(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 4) throw Error(ErrorCode::SeriesTooShort, "periodogram needs n >= 4");
  std::vector<double> ordinates(n / 2);
  const double nn = static_cast<double>(n);
  for (std::size_t j = 1; j <= n / 2; ++j) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      // Reduce t*j mod n before scaling so the phase stays accurate.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((t * j) % n) / nn;
      re += y[t - 1] * std::cos(phase);
      im -= y[t - 1] * std::sin(phase);
    }
    ordinates[j - 1] = (re * re + im * im) / nn;
  }
  return ordinates;
}

std::vector<double> periodogram(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 4) throw Error(ErrorCode::SeriesTooShort, "periodogram needs n >= 4");
  if (!is_power_of_two(n)) return periodogram_direct(y);
  // The 1-based time index only rotates the phase, so |X_j| is unchanged.
  std::vector<std::complex<double>> a(y.begin(), y.end());
  fft(a);
  std::vector<double> ordinates(n / 2);
  for (std::size_t j = 1; j <= n / 2; ++j) ordinates[j - 1] = std::norm(a[j]) / static_cast<double>(n);
  return ordinates;
}

double periodogram_distance(std::span<const double> y, std::span<const double> z) {
  check_lengths(y, z);
  return spectrum_distance(periodogram(y), periodogram(z));
}

DistanceEvaluator::DistanceEvaluator(const Dataset& data, DistanceKind kind)
    : data_(data), kind_(kind) {
  if (kind_ == DistanceKind::Periodogram) {
    spectra_.reserve(data.size());
    for (const auto& s : data.series) spectra_.push_back(periodogram(s.values));
  }
}

Matrix DistanceEvaluator::matrix(const Matrix& centers) const {
  const auto n = static_cast<Eigen::Index>(data_.length());
  if (centers.cols() != n)
    throw Error(ErrorCode::LengthMismatch, "centers are not evaluated on the dataset domain");
  const Eigen::Index rows = static_cast<Eigen::Index>(data_.size());
  const Eigen::Index k_count = centers.rows();
  Matrix out(rows, k_count);
  std::vector<std::vector<double>> center_values(static_cast<std::size_t>(k_count));
  for (Eigen::Index k = 0; k < k_count; ++k) {
    auto& cv = center_values[static_cast<std::size_t>(k)];
    cv.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) cv[static_cast<std::size_t>(j)] = centers(k, j);
  }
  std::vector<std::vector<double>> center_spectra;
  if (kind_ == DistanceKind::Periodogram)
    for (const auto& cv : center_values) center_spectra.push_back(periodogram(cv));

  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& y = data_.series[static_cast<std::size_t>(i)].values;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const auto& c = center_values[static_cast<std::size_t>(k)];
      double d = 0.0;
      switch (kind_) {
        case DistanceKind::Euclidean: d = euclidean(y, c); break;
        case DistanceKind::PenroseShape: d = penrose_shape(y, c); break;
        case DistanceKind::Periodogram:
          d = spectrum_distance(spectra_[static_cast<std::size_t>(i)],
                                center_spectra[static_cast<std::size_t>(k)]);
          break;
      }
      out(i, k) = d;
    }
  }
  return out;
}

Matrix distance_matrix(const Dataset& data, const Matrix& centers, DistanceKind kind) {
  return DistanceEvaluator(data, kind).matrix(centers);
}

}  // namespace tsboost::distance
