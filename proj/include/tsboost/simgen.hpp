#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsboost/core.hpp"

// Six-cluster functional benchmark: cluster-specific mean curves with random
// coefficients, a per-series random level and AR(1) disturbances.
namespace tsboost::simgen {

struct SimConfig {
  std::vector<std::size_t> cluster_sizes{90, 50, 100, 25, 60, 35};
  std::size_t points = 10;  // equally spaced on [0, 1]
  double sigma2_e = 0.08;   // coefficient variance
  double sigma2_v = 0.85;   // variance of the saturation level and amplitude (cluster 5)
  double sigma2_u = 0.3;    // random level variance
  double ar_coefficient = 0.5;
  double ar_innovation_variance = 0.002;
  std::uint64_t seed = 1;
};

// Throws ConfigError: six sizes >= 1, points >= 2, variances >= 0, |phi| < 1.
void validate(const SimConfig& config);

struct Simulation {
  Dataset data;
  std::vector<int> labels;  // 1..6
};

// Series are ordered cluster by cluster; ids are "s<cluster>_<index>".
Simulation generate(const SimConfig& config);

}  // namespace tsboost::simgen
