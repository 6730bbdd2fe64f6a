#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsboost/core.hpp"

// Penalized B-spline (P-spline) smoothing on equidistant knots.
namespace tsboost::pspline {

struct SplineBasis {
  int degree = 3;
  int interior_knots = 0;
  std::vector<double> knots;   // equidistant, padded with `degree` knots on each side
  std::vector<double> domain;  // evaluation points
  Matrix B;                    // n x m evaluation matrix

  std::size_t size() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t points() const { return static_cast<std::size_t>(B.rows()); }
};

// min(ceil(n/4), 40): the interior knot rule used for every fit unless overridden.
int default_interior_knots(std::size_t n);

// Throws DomainTooShort when the domain has fewer than degree+1 points.
SplineBasis build_basis(std::span<const double> domain, int degree = 3,
                        std::optional<int> interior_knots = std::nullopt);

struct PenaltyMatrix {
  int order = 2;
  Matrix D;  // (m-order) x m
};

PenaltyMatrix difference_penalty(std::size_t m, int order = 2);

// Per-point sufficient statistics of the observations being smoothed. A plain
// series has one unit-weight observation per point. Pooled scatter data (several
// series on the same grid, each counted with a multiplicity) collapses to the
// per-point mean, the number of observations behind it and the replicate sum of
// squares around it, which is all the criteria need.
struct SmoothingData {
  Vector y;             // per-point (weighted) mean response
  Vector weights;       // per-point total weight
  Vector unit_weight;   // weight carried by one observation at the point
  Vector replicate_ss;  // sum over observations of (y_obs - y)^2, unweighted

  static SmoothingData from_series(const Vector& y);
  static SmoothingData weighted(const Vector& y, const Vector& weights);

  std::size_t points() const { return static_cast<std::size_t>(y.size()); }
  // Number of observations (n for a plain series).
  double observation_count() const;
};

struct SplineFit {
  std::shared_ptr<const SplineBasis> basis;
  std::shared_ptr<const PenaltyMatrix> penalty;
  double lambda = 0.0;
  Vector weights;       // diagonal of W used in the solve
  Vector coefficients;  // a
  Vector fitted;        // B a
};

// a = (B'WB + lambda D'D)^-1 B'W y. Weights default to the identity.
// Throws SingularSystem when the system is not positive definite.
SplineFit fit_pspline(const Vector& y, const std::optional<Vector>& weights,
                      std::shared_ptr<const SplineBasis> basis,
                      std::shared_ptr<const PenaltyMatrix> penalty, double lambda);

SplineFit fit_pspline(const SmoothingData& data, std::shared_ptr<const SplineBasis> basis,
                      std::shared_ptr<const PenaltyMatrix> penalty, double lambda);

// trace((B'WB + lambda D'D)^-1 B'WB).
double effective_dimension(const SplineBasis& basis, const PenaltyMatrix& penalty, double lambda,
                           const std::optional<Vector>& weights = std::nullopt);

// Penalized objective sum w (y - Ba)^2 + lambda |Da|^2 at arbitrary coefficients.
double penalized_objective(const Vector& y, const Vector& weights, const SplineBasis& basis,
                           const PenaltyMatrix& penalty, double lambda, const Vector& a);

// Raw criterion formulas.
double aic_value(double rss, double ed, double n);  // 2 ED + 2 n ln(sqrt(rss/n))
double gcv_value(double rss, double ed, double n);  // rss / (n - ED)^2

double score_aic(const Vector& y, const SplineFit& fit);
double score_loocv(const Vector& y, const SplineBasis& basis, const PenaltyMatrix& penalty,
                   double lambda);
double score_gcv(const Vector& y, const SplineFit& fit);

enum class Criterion { Aic, Loocv, Gcv, LCurve, VCurve };

std::string_view to_string(Criterion c);
// Accepts aic, loocv, gcv, lcurve, vcurve (case-insensitive).
Criterion parse_criterion(std::string_view name);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct LambdaCriterion {
  Criterion name = Criterion::VCurve;
  std::vector<double> grid = log_grid(1e-6, 1e6, 50);
};

// Throws InvalidArgument unless the grid is positive, strictly increasing and
// has at least 10 points.
void validate(const LambdaCriterion& criterion);

// V(lambda) on interval midpoints from forward differences in ln(lambda).
// Returns grid.size()-1 scores.
std::vector<double> vcurve_scores(std::span<const double> psi, std::span<const double> phi,
                                  std::span<const double> grid);

// Signed curvature of (psi, phi) parameterized by ln(lambda) at interior grid
// points (three-point differences). Returns grid.size()-2 values.
std::vector<double> lcurve_curvature(std::span<const double> psi, std::span<const double> phi,
                                     std::span<const double> grid);

struct LambdaSelection {
  double lambda = 0.0;
  std::size_t index = 0;          // position of the winner in `score_lambda`
  std::vector<double> grid;       // the candidate lambdas
  std::vector<double> rss;        // weighted residual sum of squares per grid lambda
  std::vector<double> roughness;  // |D a|^2 per grid lambda
  std::vector<double> score_lambda;  // where each score is attributed
  std::vector<double> scores;        // NaN where the criterion is undefined
  SplineFit fit;                     // fit at the selected lambda
};

// Throws FlatCriterion when the finite scores span less than 1e-14 (or none is finite).
LambdaSelection select_lambda(const SmoothingData& data, std::shared_ptr<const SplineBasis> basis,
                              std::shared_ptr<const PenaltyMatrix> penalty,
                              const LambdaCriterion& criterion);

LambdaSelection select_lambda(const Vector& y, std::shared_ptr<const SplineBasis> basis,
                              std::shared_ptr<const PenaltyMatrix> penalty,
                              const LambdaCriterion& criterion);

struct SmootherSettings {
  int degree = 3;
  int penalty_order = 2;
  std::optional<int> interior_knots;  // default_interior_knots(n) when empty
  LambdaCriterion criterion;
};

// P-spline smoother on a fixed domain whose lambda is chosen by a criterion.
// When the criterion is flat (the data lie in the penalty null space, so every
// lambda gives the same fit) the largest grid lambda is used.
class OptimalSmoother {
 public:
  OptimalSmoother(std::span<const double> domain, SmootherSettings settings);

  SplineFit fit(const SmoothingData& data) const;
  SplineFit fit(const Vector& y) const { return fit(SmoothingData::from_series(y)); }

  const SmootherSettings& settings() const { return settings_; }
  const std::shared_ptr<const SplineBasis>& basis() const { return basis_; }
  const std::shared_ptr<const PenaltyMatrix>& penalty() const { return penalty_; }

 private:
  SmootherSettings settings_;
  std::shared_ptr<const SplineBasis> basis_;
  std::shared_ptr<const PenaltyMatrix> penalty_;
};

}  // namespace tsboost::pspline
