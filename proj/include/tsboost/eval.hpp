#pragma once

#include <map>
#include <span>
#include <vector>

#include "tsboost/core.hpp"
#include "tsboost/distance.hpp"
#include "tsboost/pdclust.hpp"
#include "tsboost/pspline.hpp"

// Partition agreement measures.
namespace tsboost::eval {

// A membership matrix read as a fuzzy partition (one membership vector per series).
using FuzzyPartition = MembershipMatrix;

// 1 - (1/2) sum_k |p_k - q_k|.
double fuzzy_equivalence(std::span<const double> p, std::span<const double> q);

// Fuzzy Rand index: 1 - mean over unordered pairs of |E_P(i,j) - E_Q(i,j)|.
// P and Q may have different cluster counts. Throws SizeMismatch on differing N.
double fuzzy_rand(const FuzzyPartition& p, const FuzzyPartition& q);

// Fraction of unordered pairs on which the two labelings agree about co-membership.
double classic_rand(std::span<const int> a, std::span<const int> b);

// Rows are the sorted distinct truth labels, columns the sorted distinct predicted labels.
struct ConfusionMatrix {
  std::vector<int> truth_labels;
  std::vector<int> predicted_labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted);

// Share of series whose predicted cluster's majority truth label matches their own.
double purity(std::span<const int> truth, std::span<const int> predicted);

// One-hot membership matrix from 1-based labels (K = max label).
MembershipMatrix crisp_partition(std::span<const int> labels);

// Reference partition: a P-spline center is fitted to the pooled members of each
// true cluster, then every series gets PD probabilities against those centers.
// Clusters are ordered by sorted distinct label.
struct ReferencePartition {
  std::vector<int> labels;  // cluster order
  Matrix centers;           // one row per label
  pdclust::ProbabilityModel model;
};

ReferencePartition reference_partition(const Dataset& data, std::span<const int> true_labels,
                                       distance::DistanceKind kind,
                                       const pspline::SmootherSettings& spline);

}  // namespace tsboost::eval
