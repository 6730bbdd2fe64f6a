#pragma once

#include "tsboost/core.hpp"

// Probabilistic-distance membership model: P(i,k) * d(i,k) is constant in k.
namespace tsboost::pdclust {

struct ProbabilityModel {
  MembershipMatrix P;
  Matrix distances;
};

// Row-wise P(i,k) = prod_{h != k} d(i,h) / sum_m prod_{h != m} d(i,h).
// A single zero distance takes the whole row; several zeros share it equally.
// Throws NegativeDistance on negative or non-finite input.
ProbabilityModel pd_probabilities(const Matrix& distances);

// BC = (1/N) sum_i prod_k (K P(i,k)). 0 for a crisp partition, 1 when every row is uniform.
double bc_index(const MembershipMatrix& p);

// beta = sum_i prod_k (K P(i,k)) = N * BC.
double loss_beta(const MembershipMatrix& p);

inline double bc_index(const ProbabilityModel& m) { return bc_index(m.P); }
inline double loss_beta(const ProbabilityModel& m) { return loss_beta(m.P); }

}  // namespace tsboost::pdclust
