#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsboost/core.hpp"

// Fuzzy c-means with squared Euclidean distance, the fuzzifier-dependent baseline.
namespace tsboost::fcm {

struct FcmConfig {
  std::size_t clusters = 2;
  double fuzzifier = 2.0;  // m > 1
  double epsilon = 1e-6;   // stop when max |U' - U| < epsilon
  std::size_t max_sweeps = 500;
  std::uint64_t seed = 1;
};

void validate(const FcmConfig& config, std::size_t series_count);

// c_k = sum_i u(i,k)^m y_i / sum_i u(i,k)^m. Rows of the result are centers.
// Throws EmptyCluster when a column of U^m sums below 1e-300.
Matrix fcm_centers(const Matrix& data, const MembershipMatrix& u, double m);

// u(i,k) = 1 / sum_h (|y_i - c_k|^2 / |y_i - c_h|^2)^(1/(m-1)); a series sitting on
// a center gets membership 1 there (shared equally if it sits on several).
MembershipMatrix fcm_memberships(const Matrix& data, const Matrix& centers, double m);

// J_m = sum_i sum_k u(i,k)^m |y_i - c_k|^2.
double objective(const Matrix& data, const MembershipMatrix& u, const Matrix& centers, double m);

// Row i drawn uniformly from the probability simplex.
MembershipMatrix random_memberships(std::size_t rows, std::size_t clusters, std::uint64_t seed);

struct FcmResult {
  MembershipMatrix U;
  Matrix centers;                 // K x n, recomputed from the final U
  std::vector<double> objective;  // J_m after each sweep
  std::vector<double> bc;         // BC index of U after each sweep
  std::size_t sweeps = 0;
  bool converged = false;
};

FcmResult run_fcm(const Dataset& data, const FcmConfig& config);
FcmResult run_fcm(const Dataset& data, const FcmConfig& config, MembershipMatrix initial);

// Mean over rows of -sum_k u log u.
double mean_row_entropy(const MembershipMatrix& u);

}  // namespace tsboost::fcm
