#include "tsboost/core.hpp"

#include <cmath>

namespace tsboost {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::RaggedLengths: return "RaggedLengths";
    case ErrorCode::NonIncreasingDomain: return "NonIncreasingDomain";
    case ErrorCode::TooFewSeries: return "TooFewSeries";
    case ErrorCode::InvalidMembership: return "InvalidMembership";
    case ErrorCode::DomainTooShort: return "DomainTooShort";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ZeroResidual: return "ZeroResidual";
    case ErrorCode::LeverageOne: return "LeverageOne";
    case ErrorCode::EDSaturated: return "EDSaturated";
    case ErrorCode::FlatCriterion: return "FlatCriterion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::DegenerateBeta: return "DegenerateBeta";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Matrix Dataset::as_matrix() const {
  Matrix m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(length()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < length(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = series[i].values[j];
  return m;
}

const Dataset& validate_dataset(const Dataset& raw) {
  if (raw.series.size() < 2)
    throw Error(ErrorCode::TooFewSeries,
                "dataset needs at least 2 series, got " + std::to_string(raw.series.size()));
  const std::size_t n = raw.domain.size();
  if (n < 2) throw Error(ErrorCode::RaggedLengths, "time domain needs at least 2 points");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(raw.domain[j]))
      throw Error(ErrorCode::NonFiniteValue, "non-finite time point at position " + std::to_string(j));
    if (j > 0 && !(raw.domain[j] > raw.domain[j - 1]))
      throw Error(ErrorCode::NonIncreasingDomain,
                  "time domain not strictly increasing at position " + std::to_string(j));
  }
  for (const auto& s : raw.series) {
    if (s.values.size() != n)
      throw Error(ErrorCode::RaggedLengths, "series '" + s.id + "' has length " +
                                                std::to_string(s.values.size()) + ", expected " +
                                                std::to_string(n));
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(s.values[j]))
        throw Error(ErrorCode::NonFiniteValue,
                    "series '" + s.id + "' has a non-finite value at position " + std::to_string(j));
  }
  return raw;
}

MembershipMatrix::MembershipMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw Error(ErrorCode::InvalidMembership, "empty membership matrix");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < values_.cols(); ++k) {
      const double v = values_(i, k);
      if (!std::isfinite(v) || v < -kRowSumTolerance || v > 1.0 + kRowSumTolerance)
        throw Error(ErrorCode::InvalidMembership, "entry (" + std::to_string(i) + "," +
                                                      std::to_string(k) + ") outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw Error(ErrorCode::InvalidMembership,
                  "row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
}

double MembershipMatrix::max_row_sum_deviation() const {
  if (values_.size() == 0) return 0.0;
  return (values_.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

bool MembershipMatrix::is_non_degenerate() const {
  const double n = static_cast<double>(values_.rows());
  for (Eigen::Index k = 0; k < values_.cols(); ++k) {
    const double s = values_.col(k).sum();
    if (!(s > 0.0 && s < n)) return false;
  }
  return true;
}

HardAssignment harden(const Matrix& p) {
  HardAssignment labels(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < p.cols(); ++k)
      if (p(i, k) > p(i, best)) best = k;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return labels;
}

HardAssignment harden(const MembershipMatrix& p) { return harden(p.values()); }

}  // namespace tsboost
