#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tsboost/core.hpp"
#include "tsboost/distance.hpp"
#include "tsboost/pdclust.hpp"
#include "tsboost/pspline.hpp"
#include "tsboost/random.hpp"

// Boosted probabilistic clustering: PD memberships drive per-cluster weighted
// resampling, and cluster centers are P-spline fits to the resampled series.
namespace tsboost::boost {

struct BoostConfig {
  std::size_t clusters = 2;
  std::size_t max_iterations = 100;
  std::size_t restarts = 10;
  distance::DistanceKind distance = distance::DistanceKind::Euclidean;
  std::uint64_t seed = 1;
  pspline::SmootherSettings spline;
  std::optional<std::size_t> sample_size;  // series drawn per cluster; defaults to N
  std::size_t threads = 0;                 // restarts run in parallel; 0 = hardware concurrency
};

// Throws ConfigError unless 2 <= K < N, iterations >= 1, restarts >= 1.
void validate(const BoostConfig& config, std::size_t series_count);

// gamma(i,k) = d(i,k) / max_h d(i,h); indicator is +1 at the most probable
// cluster of each row (lowest index on ties) and -1 elsewhere.
struct GammaMatrix {
  Matrix gamma;
  Matrix indicator;
};

GammaMatrix gamma_matrix(const Matrix& distances, const MembershipMatrix& p);

// Raw weights beta^(gamma * indicator), elementwise.
Matrix raw_weights(const GammaMatrix& g, double beta);

// Column-stochastic resampling weights: raw weights normalized within each
// row, then within each column. Throws DegenerateBeta when beta <= 0.
struct WeightMatrix {
  Matrix W;
};

WeightMatrix compute_weights(const Matrix& distances, const pdclust::ProbabilityModel& model,
                             double beta);

// `sample_size` indices drawn with replacement, index i with probability weights[i].
std::vector<std::size_t> draw_cluster_sample(std::span<const double> weights,
                                             std::size_t sample_size, RandomStream& stream);

// Pooled scatter of the sampled series; a series drawn r times counts r times.
// The pool as a whole carries the weight of a single curve.
pspline::SmoothingData pool_sample(const Dataset& data, std::span<const std::size_t> sample);

// One optimal P-spline through the pooled scatter of the sample.
pspline::SplineFit estimate_center(const Dataset& data, std::span<const std::size_t> sample,
                                   const pspline::OptimalSmoother& smoother);

// Pooled scatter of a cluster's center history, one unit-weight curve per
// iteration. Its per-point mean is the running mean of the history.
pspline::SmoothingData pool_history(std::span<const pspline::SplineFit> history);

// Optimal P-spline through the pooled center history; a history of one center
// is returned as is.
pspline::SplineFit update_center_adaptive(std::span<const pspline::SplineFit> history,
                                          const pspline::OptimalSmoother& smoother);

struct RestartTrace {
  std::vector<double> beta;  // loss per completed iteration
  std::vector<double> bc;    // BC per completed iteration
  double bc_final = 1.0;     // BC of the final centers
  bool perfect = false;      // stopped early on a crisp partition
};

struct ClusterResult {
  Matrix centers;  // K x n, on the dataset domain
  MembershipMatrix P;
  double bc_final = 1.0;
  std::vector<double> beta_trace;
  std::vector<double> bc_trace;
  std::size_t restart = 0;            // index of the restart that was kept
  std::vector<RestartTrace> restarts;  // every restart, in order
  BoostConfig config;
};

inline constexpr double kPerfectPartitionBeta = 1e-12;

// Runs config.restarts independent restarts and keeps the one with the smallest
// final BC (lowest restart index on ties). Bit-identical for any thread count.
ClusterResult run_boost(const Dataset& data, const BoostConfig& config);

// Initial centers for a restart: K distinct series, drawn uniformly.
std::vector<std::size_t> initial_center_indices(std::size_t series_count, std::size_t clusters,
                                                RandomStream& stream);

}  // namespace tsboost::boost
