#include "tsboost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsboost/boost.hpp"

namespace tsboost::eval {
namespace {

using Index = Eigen::Index;

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::SizeMismatch,
                "partitions cover " + std::to_string(a) + " and " + std::to_string(b) + " series");
}

std::vector<int> distinct(std::span<const int> labels) {
  std::vector<int> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t position(const std::vector<int>& sorted, int label) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), label) -
                                  sorted.begin());
}

// Pairwise fuzzy equivalence degrees E(i,j) for i < j, row-major over pairs.
std::vector<double> equivalence_degrees(const Matrix& m) {
  const Index n = m.rows();
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e.push_back(1.0 - 0.5 * (m.row(i) - m.row(j)).cwiseAbs().sum());
  return e;
}

}  // namespace

double fuzzy_equivalence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw Error(ErrorCode::DimensionMismatch, "membership vectors have different lengths");
  double l1 = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) l1 += std::abs(p[k] - q[k]);
  return 1.0 - 0.5 * l1;
}

double fuzzy_rand(const FuzzyPartition& p, const FuzzyPartition& q) {
  check_same_size(p.series(), q.series());
  if (p.series() < 2) throw Error(ErrorCode::SizeMismatch, "need at least two series");
  const auto ep = equivalence_degrees(p.values());
  const auto eq = equivalence_degrees(q.values());
  double discordance = 0.0;
  for (std::size_t s = 0; s < ep.size(); ++s) discordance += std::abs(ep[s] - eq[s]);
  const double n = static_cast<double>(p.series());
  return 1.0 - discordance / (n * (n - 1.0) / 2.0);
}

double classic_rand(std::span<const int> a, std::span<const int> b) {
  check_same_size(a.size(), b.size());
  if (a.size() < 2) throw Error(ErrorCode::SizeMismatch, "need at least two series");
  std::size_t agree = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j, ++pairs)
      agree += (a[i] == a[j]) == (b[i] == b[j]);
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts)
    for (std::size_t c : row) t += c;
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted) {
  check_same_size(truth.size(), predicted.size());
  ConfusionMatrix cm;
  cm.truth_labels = distinct(truth);
  cm.predicted_labels = distinct(predicted);
  cm.counts.assign(cm.truth_labels.size(), std::vector<std::size_t>(cm.predicted_labels.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++cm.counts[position(cm.truth_labels, truth[i])][position(cm.predicted_labels, predicted[i])];
  return cm;
}

double purity(std::span<const int> truth, std::span<const int> predicted) {
  const ConfusionMatrix cm = confusion_matrix(truth, predicted);
  std::size_t matched = 0;
  for (std::size_t p = 0; p < cm.predicted_labels.size(); ++p) {
    std::size_t best = 0;
    for (std::size_t t = 0; t < cm.truth_labels.size(); ++t) best = std::max(best, cm.counts[t][p]);
    matched += best;
  }
  return truth.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(truth.size());
}

MembershipMatrix crisp_partition(std::span<const int> labels) {
  if (labels.empty()) throw Error(ErrorCode::SizeMismatch, "empty labeling");
  const int k = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 1)
    throw Error(ErrorCode::InvalidArgument, "labels must be 1-based");
  Matrix m = Matrix::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) m(static_cast<Index>(i), labels[i] - 1) = 1.0;
  return MembershipMatrix(std::move(m));
}

ReferencePartition reference_partition(const Dataset& data, std::span<const int> true_labels,
                                       distance::DistanceKind kind,
                                       const pspline::SmootherSettings& spline) {
  validate_dataset(data);
  check_same_size(data.size(), true_labels.size());
  ReferencePartition ref;
  ref.labels = distinct(true_labels);
  if (ref.labels.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "reference labels must cover at least two clusters");
  const pspline::OptimalSmoother smoother(data.domain, spline);
  ref.centers.resize(static_cast<Index>(ref.labels.size()), static_cast<Index>(data.length()));
  for (std::size_t c = 0; c < ref.labels.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < true_labels.size(); ++i)
      if (true_labels[i] == ref.labels[c]) members.push_back(i);
    ref.centers.row(static_cast<Index>(c)) =
        boost::estimate_center(data, members, smoother).fitted.transpose();
  }
  ref.model = pdclust::pd_probabilities(distance::distance_matrix(data, ref.centers, kind));
  return ref;
}

}  // namespace tsboost::eval
