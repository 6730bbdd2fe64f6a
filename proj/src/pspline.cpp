#include "tsboost/pspline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace tsboost::pspline {
namespace {

using Index = Eigen::Index;

constexpr double kRankTolerance = 1e-12;
constexpr double kLogFloor = 1e-300;

// Solution of the augmented least-squares problem
// [sqrt(W) B; sqrt(lambda) D] a = [sqrt(W) y; 0] at one lambda. Going through QR
// instead of the normal equations keeps the conditioning at its square root.
struct Factor {
  Vector coefficients;
  Matrix q_top;  // first n rows of the thin Q: the hat matrix is q_top q_top'
};

class PenalizedSystem {
 public:
  PenalizedSystem(const SplineBasis& basis, const PenaltyMatrix& penalty, const SmoothingData& data)
      : basis_(basis), penalty_(penalty), data_(data) {
    if (static_cast<std::size_t>(data.y.size()) != basis.points())
      throw Error(ErrorCode::LengthMismatch, "response length " + std::to_string(data.y.size()) +
                                                 " does not match basis rows " +
                                                 std::to_string(basis.points()));
    if (penalty.D.cols() != basis.B.cols())
      throw Error(ErrorCode::DimensionMismatch, "penalty columns do not match basis size");
    const Vector root_w = data.weights.cwiseSqrt();
    wb_ = root_w.asDiagonal() * basis.B;
    wy_ = root_w.cwiseProduct(data.y);
  }

  Factor factor(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw Error(ErrorCode::InvalidArgument, "lambda must be finite and nonnegative");
    const Index n = wb_.rows();
    const Index m = wb_.cols();
    const Index p = penalty_.D.rows();
    Matrix aug(n + p, m);
    aug.topRows(n) = wb_;
    aug.bottomRows(p) = std::sqrt(lambda) * penalty_.D;
    Eigen::ColPivHouseholderQR<Matrix> qr(aug);
    qr.setThreshold(kRankTolerance);
    if (aug.rows() < m || qr.rank() < m)
      throw Error(ErrorCode::SingularSystem,
                  "penalized system is singular at lambda=" + std::to_string(lambda));
    Vector rhs = Vector::Zero(n + p);
    rhs.head(n) = wy_;
    Factor f;
    f.coefficients = qr.solve(rhs);
    const Matrix thin = qr.householderQ() * Matrix::Identity(n + p, m);
    f.q_top = thin.topRows(n);
    return f;
  }

  const Vector& coefficients(const Factor& f) const { return f.coefficients; }

  double effective_dimension(const Factor& f) const { return f.q_top.squaredNorm(); }

  // Weighted residual sum of squares over every underlying observation.
  double rss(const Vector& fitted) const {
    const Vector r = data_.y - fitted;
    return (data_.unit_weight.array() * data_.replicate_ss.array()).sum() +
           (data_.weights.array() * r.array().square()).sum();
  }

  double roughness(const Vector& a) const { return (penalty_.D * a).squaredNorm(); }

  // Leave-one-observation-out cross validation (sum of squared deleted residuals).
  double loocv(const Factor& f, const Vector& fitted) const {
    double cv = 0.0;
    for (Index j = 0; j < basis_.B.rows(); ++j) {
      const double count = observation_count(j);
      if (count <= 0.0) continue;
      // Leverage of a single observation at point j.
      const double h = f.q_top.row(j).squaredNorm() / count;
      if (h >= 1.0 - 1e-12)
        throw Error(ErrorCode::LeverageOne, "hat diagonal at point " + std::to_string(j) +
                                                " is " + std::to_string(h));
      const double r = data_.y(j) - fitted(j);
      cv += (data_.replicate_ss(j) + count * r * r) / ((1.0 - h) * (1.0 - h));
    }
    return cv;
  }

  double observation_count(Index j) const {
    return data_.unit_weight(j) > 0.0 ? data_.weights(j) / data_.unit_weight(j) : 0.0;
  }

 private:
  const SplineBasis& basis_;
  const PenaltyMatrix& penalty_;
  const SmoothingData& data_;
  Matrix wb_;
  Vector wy_;
};

void check_weights(const Vector& w, std::size_t n) {
  if (static_cast<std::size_t>(w.size()) != n)
    throw Error(ErrorCode::LengthMismatch, "weight vector length does not match the data");
  bool any_positive = false;
  for (Index j = 0; j < w.size(); ++j) {
    if (!std::isfinite(w(j)) || w(j) < 0.0)
      throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
    any_positive = any_positive || w(j) > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::InvalidArgument, "weights are all zero");
}

double zero_residual_threshold(const SmoothingData& data) {
  const double scale = (data.weights.array() * data.y.array().square()).sum() +
                       (data.unit_weight.array() * data.replicate_ss.array()).sum();
  return 1e-24 * std::max(scale, std::numeric_limits<double>::min());
}

double checked_aic(double rss, double ed, double n, double threshold) {
  if (rss <= threshold)
    throw Error(ErrorCode::ZeroResidual, "residuals vanish; ln(sigma) is unbounded");
  return aic_value(rss, ed, n);
}

double checked_gcv(double rss, double ed, double n) {
  if (ed >= n - 1e-9)
    throw Error(ErrorCode::EDSaturated, "effective dimension " + std::to_string(ed) +
                                            " reaches the observation count " + std::to_string(n));
  return gcv_value(rss, ed, n);
}

}  // namespace

int default_interior_knots(std::size_t n) {
  const auto quarter = static_cast<int>((n + 3) / 4);
  return std::min(quarter, 40);
}

SplineBasis build_basis(std::span<const double> domain, int degree,
                        std::optional<int> interior_knots) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be nonnegative");
  const std::size_t n = domain.size();
  if (n < static_cast<std::size_t>(degree) + 1 || n < 2)
    throw Error(ErrorCode::DomainTooShort, "domain of length " + std::to_string(n) +
                                               " is too short for degree " +
                                               std::to_string(degree));
  const int k = interior_knots.value_or(default_interior_knots(n));
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "need at least one interior knot");

  SplineBasis basis;
  basis.degree = degree;
  basis.interior_knots = k;
  basis.domain.assign(domain.begin(), domain.end());

  const double lo = domain.front();
  const double hi = domain.back();
  if (!(hi > lo)) throw Error(ErrorCode::NonIncreasingDomain, "domain has zero width");
  const double dx = (hi - lo) / (k + 1);
  const int knot_count = k + 2 + 2 * degree;
  basis.knots.resize(static_cast<std::size_t>(knot_count));
  for (int i = 0; i < knot_count; ++i) basis.knots[static_cast<std::size_t>(i)] = lo + (i - degree) * dx;

  const int m = k + degree + 1;
  basis.B = Matrix::Zero(static_cast<Index>(n), m);
  const auto& t = basis.knots;
  std::vector<double> left(static_cast<std::size_t>(degree) + 1), right(left.size()),
      values(left.size());
  for (std::size_t row = 0; row < n; ++row) {
    const double x = domain[row];
    int span = degree + static_cast<int>(std::floor((x - lo) / dx));
    span = std::clamp(span, degree, degree + k);
    // Cox-de Boor triangle for the degree+1 nonzero functions on this span.
    values[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
      left[static_cast<std::size_t>(j)] = x - t[static_cast<std::size_t>(span + 1 - j)];
      right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(span + j)] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double denom =
            right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
        const double temp = values[static_cast<std::size_t>(r)] / denom;
        values[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
        saved = left[static_cast<std::size_t>(j - r)] * temp;
      }
      values[static_cast<std::size_t>(j)] = saved;
    }
    for (int r = 0; r <= degree; ++r)
      basis.B(static_cast<Index>(row), span - degree + r) =
          std::max(0.0, values[static_cast<std::size_t>(r)]);  // round-off at knots
  }
  return basis;
}

PenaltyMatrix difference_penalty(std::size_t m, int order) {
  if (order < 0 || static_cast<std::size_t>(order) >= m)
    throw Error(ErrorCode::InvalidArgument, "penalty order must be in [0, m)");
  Matrix d = Matrix::Identity(static_cast<Index>(m), static_cast<Index>(m));
  for (int i = 0; i < order; ++i)
    d = (d.bottomRows(d.rows() - 1) - d.topRows(d.rows() - 1)).eval();
  return PenaltyMatrix{order, std::move(d)};
}

SmoothingData SmoothingData::from_series(const Vector& y) {
  return SmoothingData{y, Vector::Ones(y.size()), Vector::Ones(y.size()), Vector::Zero(y.size())};
}

SmoothingData SmoothingData::weighted(const Vector& y, const Vector& weights) {
  check_weights(weights, static_cast<std::size_t>(y.size()));
  return SmoothingData{y, weights, weights, Vector::Zero(y.size())};
}

double SmoothingData::observation_count() const {
  double n = 0.0;
  for (Index j = 0; j < y.size(); ++j)
    if (unit_weight(j) > 0.0) n += weights(j) / unit_weight(j);
  return n;
}

SplineFit fit_pspline(const SmoothingData& data, std::shared_ptr<const SplineBasis> basis,
                      std::shared_ptr<const PenaltyMatrix> penalty, double lambda) {
  const PenalizedSystem system(*basis, *penalty, data);
  const auto factor = system.factor(lambda);
  SplineFit fit;
  fit.coefficients = system.coefficients(factor);
  fit.fitted = basis->B * fit.coefficients;
  fit.lambda = lambda;
  fit.weights = data.weights;
  fit.basis = std::move(basis);
  fit.penalty = std::move(penalty);
  return fit;
}

SplineFit fit_pspline(const Vector& y, const std::optional<Vector>& weights,
                      std::shared_ptr<const SplineBasis> basis,
                      std::shared_ptr<const PenaltyMatrix> penalty, double lambda) {
  const SmoothingData data =
      weights ? SmoothingData::weighted(y, *weights) : SmoothingData::from_series(y);
  return fit_pspline(data, std::move(basis), std::move(penalty), lambda);
}

double effective_dimension(const SplineBasis& basis, const PenaltyMatrix& penalty, double lambda,
                           const std::optional<Vector>& weights) {
  const Vector zeros = Vector::Zero(static_cast<Index>(basis.points()));
  const SmoothingData data =
      weights ? SmoothingData::weighted(zeros, *weights) : SmoothingData::from_series(zeros);
  const PenalizedSystem system(basis, penalty, data);
  return system.effective_dimension(system.factor(lambda));
}

double penalized_objective(const Vector& y, const Vector& weights, const SplineBasis& basis,
                           const PenaltyMatrix& penalty, double lambda, const Vector& a) {
  const Vector r = y - basis.B * a;
  return (weights.array() * r.array().square()).sum() + lambda * (penalty.D * a).squaredNorm();
}

double aic_value(double rss, double ed, double n) {
  return 2.0 * ed + 2.0 * n * std::log(std::sqrt(rss / n));
}

double gcv_value(double rss, double ed, double n) { return rss / ((n - ed) * (n - ed)); }

double score_aic(const Vector& y, const SplineFit& fit) {
  const SmoothingData data = SmoothingData::weighted(y, fit.weights);
  const PenalizedSystem system(*fit.basis, *fit.penalty, data);
  const double ed = system.effective_dimension(system.factor(fit.lambda));
  return checked_aic(system.rss(fit.fitted), ed, data.observation_count(),
                     zero_residual_threshold(data));
}

double score_loocv(const Vector& y, const SplineBasis& basis, const PenaltyMatrix& penalty,
                   double lambda) {
  const SmoothingData data = SmoothingData::from_series(y);
  const PenalizedSystem system(basis, penalty, data);
  const auto factor = system.factor(lambda);
  const Vector fitted = basis.B * system.coefficients(factor);
  return system.loocv(factor, fitted);
}

double score_gcv(const Vector& y, const SplineFit& fit) {
  const SmoothingData data = SmoothingData::weighted(y, fit.weights);
  const PenalizedSystem system(*fit.basis, *fit.penalty, data);
  const double ed = system.effective_dimension(system.factor(fit.lambda));
  return checked_gcv(system.rss(fit.fitted), ed, data.observation_count());
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Aic: return "aic";
    case Criterion::Loocv: return "loocv";
    case Criterion::Gcv: return "gcv";
    case Criterion::LCurve: return "lcurve";
    case Criterion::VCurve: return "vcurve";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Criterion c : {Criterion::Aic, Criterion::Loocv, Criterion::Gcv, Criterion::LCurve,
                      Criterion::VCurve})
    if (lower == to_string(c)) return c;
  throw Error(ErrorCode::ConfigError, "unknown lambda criterion '" + std::string(name) + "'");
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return grid;
}

void validate(const LambdaCriterion& criterion) {
  const auto& g = criterion.grid;
  if (g.size() < 10)
    throw Error(ErrorCode::InvalidArgument, "lambda grid needs at least 10 points");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0) || !std::isfinite(g[i]))
      throw Error(ErrorCode::InvalidArgument, "lambda grid must be strictly positive");
    if (i > 0 && !(g[i] > g[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "lambda grid must be strictly increasing");
  }
}

std::vector<double> vcurve_scores(std::span<const double> psi, std::span<const double> phi,
                                  std::span<const double> grid) {
  std::vector<double> v;
  if (grid.size() < 2) return v;
  v.reserve(grid.size() - 1);
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double du = std::log(grid[g + 1]) - std::log(grid[g]);
    const double dpsi = (psi[g + 1] - psi[g]) / du;
    const double dphi = (phi[g + 1] - phi[g]) / du;
    v.push_back(std::sqrt(dpsi * dpsi + dphi * dphi));
  }
  return v;
}

std::vector<double> lcurve_curvature(std::span<const double> psi, std::span<const double> phi,
                                     std::span<const double> grid) {
  std::vector<double> kappa;
  if (grid.size() < 3) return kappa;
  kappa.reserve(grid.size() - 2);
  for (std::size_t g = 1; g + 1 < grid.size(); ++g) {
    const double h0 = std::log(grid[g]) - std::log(grid[g - 1]);
    const double h1 = std::log(grid[g + 1]) - std::log(grid[g]);
    // Three-point derivatives on a possibly non-uniform grid.
    auto d1 = [&](std::span<const double> f) {
      return (-h1 / (h0 * (h0 + h1))) * f[g - 1] + ((h1 - h0) / (h0 * h1)) * f[g] +
             (h0 / (h1 * (h0 + h1))) * f[g + 1];
    };
    auto d2 = [&](std::span<const double> f) {
      return 2.0 * (f[g - 1] / (h0 * (h0 + h1)) - f[g] / (h0 * h1) + f[g + 1] / (h1 * (h0 + h1)));
    };
    const double x1 = d1(psi), y1 = d1(phi), x2 = d2(psi), y2 = d2(phi);
    const double speed = std::pow(x1 * x1 + y1 * y1, 1.5);
    kappa.push_back(speed > 0.0 ? (x1 * y2 - y1 * x2) / speed
                                : std::numeric_limits<double>::quiet_NaN());
  }
  return kappa;
}

LambdaSelection select_lambda(const SmoothingData& data, std::shared_ptr<const SplineBasis> basis,
                              std::shared_ptr<const PenaltyMatrix> penalty,
                              const LambdaCriterion& criterion) {
  validate(criterion);
  const PenalizedSystem system(*basis, *penalty, data);
  const auto& grid = criterion.grid;
  const std::size_t count = grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double n_obs = data.observation_count();
  const double zero_rss = zero_residual_threshold(data);

  LambdaSelection sel;
  sel.grid = grid;
  sel.rss.resize(count);
  sel.roughness.resize(count);
  std::vector<Vector> coefs(count);
  std::vector<double> pointwise(count, nan);

  for (std::size_t g = 0; g < count; ++g) {
    const auto factor = system.factor(grid[g]);
    coefs[g] = system.coefficients(factor);
    const Vector fitted = basis->B * coefs[g];
    sel.rss[g] = system.rss(fitted);
    sel.roughness[g] = system.roughness(coefs[g]);
    try {
      switch (criterion.name) {
        case Criterion::Aic:
          pointwise[g] = checked_aic(sel.rss[g], system.effective_dimension(factor), n_obs, zero_rss);
          break;
        case Criterion::Gcv:
          pointwise[g] = checked_gcv(sel.rss[g], system.effective_dimension(factor), n_obs);
          break;
        case Criterion::Loocv:
          pointwise[g] = system.loocv(factor, fitted);
          break;
        case Criterion::LCurve:
        case Criterion::VCurve:
          break;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroResidual && e.code() != ErrorCode::EDSaturated &&
          e.code() != ErrorCode::LeverageOne)
        throw;
    }
  }

  // Residuals or roughness at round-off level put the L-curve point at the log
  // of noise; such points are undefined.
  std::vector<double> psi(count), phi(count);
  for (std::size_t g = 0; g < count; ++g) {
    const double zero_rough = 1e-24 * std::max(coefs[g].squaredNorm(), kLogFloor);
    psi[g] = sel.rss[g] > zero_rss ? std::log(sel.rss[g]) : nan;
    phi[g] = sel.roughness[g] > zero_rough ? std::log(sel.roughness[g]) : nan;
  }

  // Scores are minimized; the L-curve curvature is negated so that the corner wins.
  // `coef_index[s]` maps score s back to the grid point(s) whose fit it selects.
  bool midpoint = false;
  std::size_t offset = 0;
  switch (criterion.name) {
    case Criterion::Aic:
    case Criterion::Gcv:
    case Criterion::Loocv:
      sel.scores = pointwise;
      sel.score_lambda = grid;
      break;
    case Criterion::VCurve:
      sel.scores = vcurve_scores(psi, phi, grid);
      for (std::size_t g = 0; g + 1 < count; ++g)
        sel.score_lambda.push_back(std::sqrt(grid[g] * grid[g + 1]));
      midpoint = true;
      break;
    case Criterion::LCurve:
      sel.scores = lcurve_curvature(psi, phi, grid);
      sel.score_lambda.assign(grid.begin() + 1, grid.end() - 1);
      offset = 1;
      break;
  }
  for (double& s : sel.scores)
    if (!std::isfinite(s)) s = nan;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t best = 0;
  bool found = false;
  for (std::size_t s = 0; s < sel.scores.size(); ++s) {
    const double value =
        criterion.name == Criterion::LCurve ? -sel.scores[s] : sel.scores[s];
    if (std::isnan(value)) continue;
    if (!found || value < lo) {
      best = s;
      found = true;
    }
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  if (!found || hi - lo < 1e-14)
    throw Error(ErrorCode::FlatCriterion, std::string(to_string(criterion.name)) +
                                              " is flat across the lambda grid");

  // Where the fit has saturated (interpolation at tiny lambda), the L-curve
  // stops moving and V decays toward zero at the grid edge. The V-curve minimum
  // of interest is the interior dip, so prefer the lowest interior local minimum.
  if (criterion.name == Criterion::VCurve) {
    const auto& v = sel.scores;
    bool interior = false;
    for (std::size_t s = 1; s + 1 < v.size(); ++s) {
      if (std::isnan(v[s - 1]) || std::isnan(v[s]) || std::isnan(v[s + 1])) continue;
      if (v[s] < v[s - 1] && v[s] <= v[s + 1] && (!interior || v[s] < v[best])) {
        best = s;
        interior = true;
      }
    }
  }

  sel.index = best;
  sel.lambda = sel.score_lambda[best];
  if (midpoint) {
    // The selected lambda lies between two grid points; refit there.
    sel.fit = fit_pspline(data, basis, penalty, sel.lambda);
  } else {
    const std::size_t g = best + offset;
    sel.fit.basis = basis;
    sel.fit.penalty = penalty;
    sel.fit.lambda = grid[g];
    sel.fit.weights = data.weights;
    sel.fit.coefficients = coefs[g];
    sel.fit.fitted = basis->B * coefs[g];
  }
  return sel;
}

LambdaSelection select_lambda(const Vector& y, std::shared_ptr<const SplineBasis> basis,
                              std::shared_ptr<const PenaltyMatrix> penalty,
                              const LambdaCriterion& criterion) {
  return select_lambda(SmoothingData::from_series(y), std::move(basis), std::move(penalty),
                       criterion);
}

OptimalSmoother::OptimalSmoother(std::span<const double> domain, SmootherSettings settings)
    : settings_(std::move(settings)) {
  validate(settings_.criterion);
  auto basis = std::make_shared<SplineBasis>(
      build_basis(domain, settings_.degree, settings_.interior_knots));
  penalty_ = std::make_shared<PenaltyMatrix>(difference_penalty(basis->size(), settings_.penalty_order));
  basis_ = std::move(basis);
}

SplineFit OptimalSmoother::fit(const SmoothingData& data) const {
  try {
    return select_lambda(data, basis_, penalty_, settings_.criterion).fit;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FlatCriterion) throw;
    return fit_pspline(data, basis_, penalty_, settings_.criterion.grid.back());
  }
}

}  // namespace tsboost::pspline
