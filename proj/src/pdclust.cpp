#include "tsboost/pdclust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace tsboost::pdclust {
namespace {

using Index = Eigen::Index;

double row_product(const Matrix& p, Index i) {
  const double k = static_cast<double>(p.cols());
  double prod = 1.0;
  for (Index c = 0; c < p.cols(); ++c) prod *= k * p(i, c);
  return prod;
}

}  // namespace

ProbabilityModel pd_probabilities(const Matrix& distances) {
  const Index rows = distances.rows();
  const Index k_count = distances.cols();
  if (k_count < 1 || rows < 1) throw Error(ErrorCode::DimensionMismatch, "empty distance matrix");
  Matrix p = Matrix::Zero(rows, k_count);
  std::vector<double> logs(static_cast<std::size_t>(k_count));

  for (Index i = 0; i < rows; ++i) {
    int zeros = 0;
    for (Index k = 0; k < k_count; ++k) {
      const double d = distances(i, k);
      if (!std::isfinite(d) || d < 0.0)
        throw Error(ErrorCode::NegativeDistance, "distance (" + std::to_string(i) + "," +
                                                     std::to_string(k) + ") is " +
                                                     std::to_string(d));
      if (d == 0.0) ++zeros;
    }
    if (zeros > 0) {
      for (Index k = 0; k < k_count; ++k)
        if (distances(i, k) == 0.0) p(i, k) = 1.0 / zeros;
      continue;
    }
    // log prod_{h != k} d_h = S - log d_k; shift by the maximum before exponentiating.
    double total = 0.0;
    for (Index k = 0; k < k_count; ++k) {
      logs[static_cast<std::size_t>(k)] = std::log(distances(i, k));
      total += logs[static_cast<std::size_t>(k)];
    }
    double top = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k < k_count; ++k) {
      auto& l = logs[static_cast<std::size_t>(k)];
      l = total - l;
      top = std::max(top, l);
    }
    double norm = 0.0;
    for (Index k = 0; k < k_count; ++k) {
      p(i, k) = std::exp(logs[static_cast<std::size_t>(k)] - top);
      norm += p(i, k);
    }
    p.row(i) /= norm;
  }
  return ProbabilityModel{MembershipMatrix(std::move(p)), distances};
}

double loss_beta(const MembershipMatrix& p) {
  const Matrix& v = p.values();
  double beta = 0.0;
  for (Index i = 0; i < v.rows(); ++i) beta += row_product(v, i);
  return beta;
}

double bc_index(const MembershipMatrix& p) {
  return loss_beta(p) / static_cast<double>(p.series());
}

}  // namespace tsboost::pdclust
