#include "tsboost/boost.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace tsboost::boost {
namespace {

using Index = Eigen::Index;

// Stream paths, so that initialization and sampling never share a stream.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSampleStream = 1;

struct RestartOutcome {
  Matrix centers;
  MembershipMatrix P;
  RestartTrace trace;
};

Matrix stack_centers(const std::vector<pspline::SplineFit>& fits) {
  Matrix c(static_cast<Index>(fits.size()), fits.front().fitted.size());
  for (std::size_t k = 0; k < fits.size(); ++k) c.row(static_cast<Index>(k)) = fits[k].fitted.transpose();
  return c;
}

RestartOutcome run_restart(const Dataset& data, const BoostConfig& config, std::size_t restart,
                           const distance::DistanceEvaluator& evaluator,
                           const pspline::OptimalSmoother& smoother) {
  const std::size_t N = data.size();
  const std::size_t K = config.clusters;
  const std::size_t sample_size = config.sample_size.value_or(N);
  const Matrix values = data.as_matrix();

  RandomStream init(derive_seed(config.seed, {kInitStream, restart}));
  Matrix centers(static_cast<Index>(K), values.cols());
  const auto picks = initial_center_indices(N, K, init);
  for (std::size_t k = 0; k < K; ++k)
    centers.row(static_cast<Index>(k)) = values.row(static_cast<Index>(picks[k]));

  std::vector<std::vector<pspline::SplineFit>> history(K);
  RestartOutcome out;
  for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
    const Matrix d = evaluator.matrix(centers);
    const auto model = pdclust::pd_probabilities(d);
    const double beta = pdclust::loss_beta(model);
    out.trace.beta.push_back(beta);
    out.trace.bc.push_back(beta / static_cast<double>(N));
    if (beta < kPerfectPartitionBeta) {
      out.trace.perfect = true;
      break;
    }
    const WeightMatrix w = compute_weights(d, model, beta);

    std::vector<pspline::SplineFit> fresh;
    fresh.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
      RandomStream stream(derive_seed(config.seed, {kSampleStream, restart, iter, k}));
      const Vector column = w.W.col(static_cast<Index>(k));
      const auto sample = draw_cluster_sample(
          std::span<const double>(column.data(), static_cast<std::size_t>(column.size())),
          sample_size, stream);
      fresh.push_back(estimate_center(data, sample, smoother));
      history[k].push_back(fresh.back());
    }
    if (iter == 1) {
      centers = stack_centers(fresh);
    } else {
      std::vector<pspline::SplineFit> updated;
      updated.reserve(K);
      for (std::size_t k = 0; k < K; ++k)
        updated.push_back(update_center_adaptive(history[k], smoother));
      centers = stack_centers(updated);
    }
  }

  out.P = pdclust::pd_probabilities(evaluator.matrix(centers)).P;
  out.trace.bc_final = pdclust::bc_index(out.P);
  out.centers = std::move(centers);
  return out;
}

// Pooled scatter scaled so the whole pool carries the weight of one curve: lambda
// then means the same thing whatever the sample size, and a curve repeated r
// times smooths exactly like the curve itself.
pspline::SmoothingData per_curve(Vector mean, Vector replicate_ss, double curves) {
  const Index n = mean.size();
  return pspline::SmoothingData{std::move(mean), Vector::Ones(n), Vector::Constant(n, 1.0 / curves),
                                std::move(replicate_ss)};
}

}  // namespace

void validate(const BoostConfig& config, std::size_t series_count) {
  if (config.clusters < 2 || config.clusters >= series_count)
    throw Error(ErrorCode::ConfigError, "need 2 <= K < N, got K=" + std::to_string(config.clusters) +
                                            " with N=" + std::to_string(series_count));
  if (config.max_iterations < 1)
    throw Error(ErrorCode::ConfigError, "need at least one boosting iteration");
  if (config.restarts < 1) throw Error(ErrorCode::ConfigError, "need at least one restart");
  if (config.sample_size && *config.sample_size < 1)
    throw Error(ErrorCode::ConfigError, "sample size must be positive");
}

GammaMatrix gamma_matrix(const Matrix& distances, const MembershipMatrix& p) {
  const Index rows = distances.rows();
  const Index cols = distances.cols();
  if (static_cast<std::size_t>(rows) != p.series() || static_cast<std::size_t>(cols) != p.clusters())
    throw Error(ErrorCode::DimensionMismatch, "distance and probability shapes differ");
  GammaMatrix g{Matrix(rows, cols), Matrix::Constant(rows, cols, -1.0)};
  for (Index i = 0; i < rows; ++i) {
    const double top = distances.row(i).maxCoeff();
    // A series that coincides with every center is equally far from all of them.
    if (top > 0.0)
      g.gamma.row(i) = distances.row(i) / top;
    else
      g.gamma.row(i).setOnes();
    Index best = 0;
    for (Index k = 1; k < cols; ++k)
      if (p.values()(i, k) > p.values()(i, best)) best = k;
    g.indicator(i, best) = 1.0;
  }
  return g;
}

Matrix raw_weights(const GammaMatrix& g, double beta) {
  Matrix w(g.gamma.rows(), g.gamma.cols());
  for (Index i = 0; i < w.rows(); ++i)
    for (Index k = 0; k < w.cols(); ++k) w(i, k) = std::pow(beta, g.gamma(i, k) * g.indicator(i, k));
  return w;
}

WeightMatrix compute_weights(const Matrix& distances, const pdclust::ProbabilityModel& model,
                             double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorCode::DegenerateBeta,
                "beta must be positive and finite (beta = 0 is a perfect partition)");
  Matrix w = raw_weights(gamma_matrix(distances, model.P), beta);
  for (Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
  for (Index k = 0; k < w.cols(); ++k) w.col(k) /= w.col(k).sum();
  return WeightMatrix{std::move(w)};
}

std::vector<std::size_t> draw_cluster_sample(std::span<const double> weights,
                                             std::size_t sample_size, RandomStream& stream) {
  if (weights.empty()) throw Error(ErrorCode::InvalidArgument, "empty weight vector");
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative sampling weight");
    total += weights[i];
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling weights sum to zero");
  std::vector<std::size_t> sample(sample_size);
  for (auto& s : sample) {
    const double u = stream.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= weights.size()) idx = weights.size() - 1;
    // upper_bound can land on a zero-weight entry only through rounding; step back.
    while (weights[idx] == 0.0 && idx > 0) --idx;
    s = idx;
  }
  return sample;
}

pspline::SmoothingData pool_sample(const Dataset& data, std::span<const std::size_t> sample) {
  if (sample.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  std::vector<double> multiplicity(data.size(), 0.0);
  for (std::size_t i : sample) {
    if (i >= data.size()) throw Error(ErrorCode::InvalidArgument, "sample index out of range");
    multiplicity[i] += 1.0;
  }
  const auto n = static_cast<Index>(data.length());
  const double total = static_cast<double>(sample.size());
  Vector mean = Vector::Zero(n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (multiplicity[i] == 0.0) continue;
    for (Index j = 0; j < n; ++j)
      mean(j) += multiplicity[i] * data.series[i].values[static_cast<std::size_t>(j)];
  }
  mean /= total;
  Vector ss = Vector::Zero(n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (multiplicity[i] == 0.0) continue;
    for (Index j = 0; j < n; ++j) {
      const double e = data.series[i].values[static_cast<std::size_t>(j)] - mean(j);
      ss(j) += multiplicity[i] * e * e;
    }
  }
  return per_curve(std::move(mean), std::move(ss), total);
}

pspline::SplineFit estimate_center(const Dataset& data, std::span<const std::size_t> sample,
                                   const pspline::OptimalSmoother& smoother) {
  return smoother.fit(pool_sample(data, sample));
}

pspline::SmoothingData pool_history(std::span<const pspline::SplineFit> history) {
  if (history.empty()) throw Error(ErrorCode::InvalidArgument, "empty center history");
  const Eigen::Index n = history.front().fitted.size();
  const double count = static_cast<double>(history.size());
  Vector mean = Vector::Zero(n);
  for (const auto& h : history) mean += h.fitted;
  mean /= count;
  Vector ss = Vector::Zero(n);
  for (const auto& h : history) ss += (h.fitted - mean).array().square().matrix();
  return per_curve(std::move(mean), std::move(ss), count);
}

pspline::SplineFit update_center_adaptive(std::span<const pspline::SplineFit> history,
                                          const pspline::OptimalSmoother& smoother) {
  if (history.size() == 1) return history.front();
  return smoother.fit(pool_history(history));
}

std::vector<std::size_t> initial_center_indices(std::size_t series_count, std::size_t clusters,
                                                RandomStream& stream) {
  if (clusters > series_count)
    throw Error(ErrorCode::ConfigError, "more clusters than series");
  std::vector<std::size_t> idx(series_count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < clusters; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(stream.below(series_count - k));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(clusters);
  return idx;
}

ClusterResult run_boost(const Dataset& data, const BoostConfig& config) {
  validate_dataset(data);
  validate(config, data.size());
  const distance::DistanceEvaluator evaluator(data, config.distance);
  const pspline::OptimalSmoother smoother(data.domain, config.spline);

  std::vector<std::optional<RestartOutcome>> outcomes(config.restarts);
  std::vector<std::exception_ptr> errors(config.restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < config.restarts; r = next++) {
      try {
        outcomes[r] = run_restart(data, config, r, evaluator, smoother);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::size_t best = 0;
  for (std::size_t r = 1; r < config.restarts; ++r)
    if (outcomes[r]->trace.bc_final < outcomes[best]->trace.bc_final) best = r;

  ClusterResult result;
  result.config = config;
  result.restart = best;
  for (const auto& o : outcomes) result.restarts.push_back(o->trace);
  auto& chosen = *outcomes[best];
  result.centers = std::move(chosen.centers);
  result.P = std::move(chosen.P);
  result.bc_final = chosen.trace.bc_final;
  result.beta_trace = chosen.trace.beta;
  result.bc_trace = chosen.trace.bc;
  return result;
}

}  // namespace tsboost::boost
