#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsboost/error.hpp"

namespace tsboost {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct TimeSeriesRecord {
  std::string id;
  std::vector<double> values;
};

// N series sampled on one shared, strictly increasing time grid.
struct Dataset {
  std::vector<double> domain;
  std::vector<TimeSeriesRecord> series;

  std::size_t size() const { return series.size(); }
  std::size_t length() const { return domain.size(); }

  // Series values as an N x n matrix (row i = series i).
  Matrix as_matrix() const;
};

// Throws Error{NonFiniteValue | RaggedLengths | NonIncreasingDomain | TooFewSeries}.
const Dataset& validate_dataset(const Dataset& raw);

inline constexpr double kRowSumTolerance = 1e-9;

// N x K row-stochastic matrix of cluster memberships. Used both for fuzzy
// c-means memberships and for PD membership probabilities.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;

  // Validates entries in [0,1] and unit row sums (within kRowSumTolerance).
  explicit MembershipMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  std::size_t series() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t clusters() const { return static_cast<std::size_t>(values_.cols()); }
  double operator()(std::size_t i, std::size_t k) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }

  double max_row_sum_deviation() const;

  // Ruspini's third condition: every column sum strictly inside (0, N).
  bool is_non_degenerate() const;

 private:
  Matrix values_;
};

// Cluster labels are 1-based, matching the CSV outputs.
using HardAssignment = std::vector<int>;

// Row-wise argmax; ties go to the lowest cluster index.
HardAssignment harden(const MembershipMatrix& p);
HardAssignment harden(const Matrix& p);

}  // namespace tsboost
