#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tsboost/core.hpp"

namespace tsboost::distance {

enum class DistanceKind { Euclidean, PenroseShape, Periodogram };

std::string_view to_string(DistanceKind kind);
// Accepts euclidean, penrose, periodogram.
DistanceKind parse_kind(std::string_view name);

double euclidean(std::span<const double> y, std::span<const double> c);

// Penrose shape distance: sqrt(n/(n-1) * (dbar^2 - q^2)) with dbar^2 the mean
// squared difference and q^2 the squared mean difference. Insensitive to level.
double penrose_shape(std::span<const double> y, std::span<const double> c);

// Ordinates (1/n)|sum_t y_t exp(-i t f_j)|^2 at f_j = 2 pi j / n, j = 1..floor(n/2).
// Requires n >= 4 (SeriesTooShort otherwise).
std::vector<double> periodogram(std::span<const double> y);

// Same ordinates by direct O(n^2) summation; `periodogram` switches to a radix-2
// transform when n is a power of two.
std::vector<double> periodogram_direct(std::span<const double> y);

double periodogram_distance(std::span<const double> y, std::span<const double> z);

// Evaluates one distance kind between the dataset's series and arbitrary centers.
// Series-side transforms (periodograms) are computed once.
class DistanceEvaluator {
 public:
  DistanceEvaluator(const Dataset& data, DistanceKind kind);

  DistanceKind kind() const { return kind_; }

  // N x K matrix; centers.row(k) is center k on the dataset's domain.
  Matrix matrix(const Matrix& centers) const;

 private:
  const Dataset& data_;
  DistanceKind kind_;
  std::vector<std::vector<double>> spectra_;
};

Matrix distance_matrix(const Dataset& data, const Matrix& centers, DistanceKind kind);

}  // namespace tsboost::distance
