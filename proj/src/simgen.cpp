#include "tsboost/simgen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsboost/random.hpp"

namespace tsboost::simgen {
namespace {

constexpr double kPi = std::numbers::pi;

// Draws one series of the given cluster from its own stream.
std::vector<double> draw_series(int cluster, const std::vector<double>& x, const SimConfig& cfg,
                                RandomStream& rng) {
  const double se = cfg.sigma2_e;
  const std::size_t n = x.size();
  std::vector<double> mean(n);
  switch (cluster) {
    case 1: {
      const double alpha = rng.normal(std::numbers::sqrt2, se);
      const double beta = rng.normal(4.0 * kPi, se);
      for (std::size_t j = 0; j < n; ++j) mean[j] = alpha + std::sin(beta * kPi * x[j]);
      break;
    }
    case 2: {
      double delta = rng.normal(0.75, se);
      while (std::abs(delta) < 0.05) delta = rng.normal(0.75, se);
      const double iota = rng.normal(1.0, se);
      for (std::size_t j = 0; j < n; ++j) mean[j] = x[j] + std::pow(delta, -3.0) + iota;
      break;
    }
    case 3: {
      const double nu = rng.normal(0.0, se);
      for (std::size_t j = 0; j < n; ++j) mean[j] = nu;
      break;
    }
    case 4: {
      const double zeta = rng.normal(2.0, se);
      for (std::size_t j = 0; j < n; ++j) mean[j] = zeta + std::cos(zeta * kPi * x[j]);
      break;
    }
    case 5: {
      const double xi = rng.normal(2.0, cfg.sigma2_v);
      const double eta = rng.normal(4.0, cfg.sigma2_v);
      const double theta = rng.normal(6.0, se);
      for (std::size_t j = 0; j < n; ++j) mean[j] = xi - eta * std::exp(-theta * x[j]);
      break;
    }
    default:
      for (std::size_t j = 0; j < n; ++j) mean[j] = -3.0 * (x[j] - 0.5);
      break;
  }

  const double level = rng.normal(0.0, cfg.sigma2_u);
  // Stationary AR(1): start from the marginal distribution.
  const double phi = cfg.ar_coefficient;
  const double innovation = cfg.ar_innovation_variance;
  double eps = rng.normal(0.0, innovation / (1.0 - phi * phi));
  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) eps = phi * eps + rng.normal(0.0, innovation);
    y[j] = mean[j] + level + eps;
  }
  return y;
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.cluster_sizes.size() != 6)
    throw Error(ErrorCode::ConfigError, "exactly six cluster sizes are required");
  for (std::size_t s : config.cluster_sizes)
    if (s < 1) throw Error(ErrorCode::ConfigError, "cluster sizes must be positive");
  if (config.points < 2) throw Error(ErrorCode::ConfigError, "need at least two time points");
  for (double v : {config.sigma2_e, config.sigma2_v, config.sigma2_u, config.ar_innovation_variance})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::ConfigError, "variances must be finite and nonnegative");
  if (!(std::abs(config.ar_coefficient) < 1.0))
    throw Error(ErrorCode::ConfigError, "AR(1) coefficient must satisfy |phi| < 1");
}

Simulation generate(const SimConfig& config) {
  validate(config);
  Simulation sim;
  auto& domain = sim.data.domain;
  domain.resize(config.points);
  for (std::size_t j = 0; j < config.points; ++j)
    domain[j] = static_cast<double>(j) / static_cast<double>(config.points - 1);

  std::size_t index = 0;
  for (std::size_t c = 0; c < config.cluster_sizes.size(); ++c) {
    const int cluster = static_cast<int>(c) + 1;
    for (std::size_t s = 0; s < config.cluster_sizes[c]; ++s, ++index) {
      RandomStream rng(derive_seed(config.seed, {index}));
      sim.data.series.push_back(
          {"s" + std::to_string(cluster) + "_" + std::to_string(s + 1),
           draw_series(cluster, domain, config, rng)});
      sim.labels.push_back(cluster);
    }
  }
  return sim;
}

}  // namespace tsboost::simgen
