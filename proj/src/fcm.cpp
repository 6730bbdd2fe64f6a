#include "tsboost/fcm.hpp"

#include <cmath>
#include <string>

#include "tsboost/pdclust.hpp"
#include "tsboost/random.hpp"

namespace tsboost::fcm {
namespace {

using Index = Eigen::Index;

Matrix squared_distances(const Matrix& data, const Matrix& centers) {
  if (data.cols() != centers.cols())
    throw Error(ErrorCode::LengthMismatch, "centers and series have different lengths");
  Matrix d2(data.rows(), centers.rows());
  for (Index i = 0; i < data.rows(); ++i)
    for (Index k = 0; k < centers.rows(); ++k) d2(i, k) = (data.row(i) - centers.row(k)).squaredNorm();
  return d2;
}

}  // namespace

void validate(const FcmConfig& config, std::size_t series_count) {
  if (config.clusters < 2 || config.clusters >= series_count)
    throw Error(ErrorCode::ConfigError, "need 2 <= K < N");
  if (!(config.fuzzifier > 1.0) || !std::isfinite(config.fuzzifier))
    throw Error(ErrorCode::ConfigError, "fuzzifier must be > 1");
  if (!(config.epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be positive");
  if (config.max_sweeps < 1) throw Error(ErrorCode::ConfigError, "need at least one sweep");
}

Matrix fcm_centers(const Matrix& data, const MembershipMatrix& u, double m) {
  if (static_cast<std::size_t>(data.rows()) != u.series())
    throw Error(ErrorCode::DimensionMismatch, "membership rows do not match the data");
  const Matrix um = u.values().array().pow(m).matrix();
  Matrix centers(um.cols(), data.cols());
  for (Index k = 0; k < um.cols(); ++k) {
    const double mass = um.col(k).sum();
    if (mass < 1e-300)
      throw Error(ErrorCode::EmptyCluster, "cluster " + std::to_string(k + 1) + " has no mass");
    centers.row(k) = (um.col(k).transpose() * data) / mass;
  }
  return centers;
}

MembershipMatrix fcm_memberships(const Matrix& data, const Matrix& centers, double m) {
  if (!(m > 1.0)) throw Error(ErrorCode::ConfigError, "fuzzifier must be > 1");
  const Matrix d2 = squared_distances(data, centers);
  const double exponent = 1.0 / (m - 1.0);
  Matrix u = Matrix::Zero(d2.rows(), d2.cols());
  for (Index i = 0; i < d2.rows(); ++i) {
    int zeros = 0;
    for (Index k = 0; k < d2.cols(); ++k) zeros += d2(i, k) == 0.0;
    if (zeros > 0) {
      for (Index k = 0; k < d2.cols(); ++k)
        if (d2(i, k) == 0.0) u(i, k) = 1.0 / zeros;
      continue;
    }
    for (Index k = 0; k < d2.cols(); ++k) {
      double s = 0.0;
      for (Index h = 0; h < d2.cols(); ++h) s += std::pow(d2(i, k) / d2(i, h), exponent);
      u(i, k) = 1.0 / s;
    }
    u.row(i) /= u.row(i).sum();
  }
  return MembershipMatrix(std::move(u));
}

double objective(const Matrix& data, const MembershipMatrix& u, const Matrix& centers, double m) {
  const Matrix d2 = squared_distances(data, centers);
  return (u.values().array().pow(m) * d2.array()).sum();
}

MembershipMatrix random_memberships(std::size_t rows, std::size_t clusters, std::uint64_t seed) {
  Matrix u(static_cast<Index>(rows), static_cast<Index>(clusters));
  for (std::size_t i = 0; i < rows; ++i) {
    // Normalized Exp(1) draws are uniform on the simplex.
    RandomStream stream(derive_seed(seed, {i}));
    for (std::size_t k = 0; k < clusters; ++k)
      u(static_cast<Index>(i), static_cast<Index>(k)) = stream.exponential() + 1e-300;
    u.row(static_cast<Index>(i)) /= u.row(static_cast<Index>(i)).sum();
  }
  return MembershipMatrix(std::move(u));
}

FcmResult run_fcm(const Dataset& data, const FcmConfig& config) {
  validate_dataset(data);
  validate(config, data.size());
  return run_fcm(data, config, random_memberships(data.size(), config.clusters, config.seed));
}

FcmResult run_fcm(const Dataset& data, const FcmConfig& config, MembershipMatrix initial) {
  validate(config, data.size());
  const Matrix y = data.as_matrix();
  const double m = config.fuzzifier;
  FcmResult result;
  result.U = std::move(initial);
  while (result.sweeps < config.max_sweeps) {
    const Matrix centers = fcm_centers(y, result.U, m);
    MembershipMatrix next = fcm_memberships(y, centers, m);
    // J(U_{l+1}, c_l) is non-increasing under the alternating updates.
    result.objective.push_back(objective(y, next, centers, m));
    result.bc.push_back(pdclust::bc_index(next));
    const double change = (next.values() - result.U.values()).cwiseAbs().maxCoeff();
    result.U = std::move(next);
    ++result.sweeps;
    if (change < config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.centers = fcm_centers(y, result.U, m);
  return result;
}

double mean_row_entropy(const MembershipMatrix& u) {
  const Matrix& v = u.values();
  double total = 0.0;
  for (Index i = 0; i < v.rows(); ++i)
    for (Index k = 0; k < v.cols(); ++k)
      if (v(i, k) > 0.0) total -= v(i, k) * std::log(v(i, k));
  return total / static_cast<double>(v.rows());
}

}  // namespace tsboost::fcm
