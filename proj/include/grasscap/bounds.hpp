#pragma once

#include <cstdint>

#include "grasscap/ensemble.hpp"

namespace grasscap {

// Inputs of the pairwise Gaussian error bound: two mean/covariance pairs
// under equal priors. Covariances must be symmetric positive definite.
struct GaussianPair {
  Vector mean1;
  Vector mean2;
  Matrix cov1;
  Matrix cov2;
};

// B = 1/2 ln( |(S1+S2)/2| / (|S1|^(1/2) |S2|^(1/2)) )
//   + 1/8 (m1-m2)^T [(S1+S2)/2]^{-1} (m1-m2).
// Log-domain determinants via Cholesky; throws FactorizationError when a
// covariance is not positive definite.
double bhattacharyya_distance(const GaussianPair& p);

// 1/2 exp(-B); upper bound on the equal-prior pairwise Bayes error.
double bhattacharyya_bound(const GaussianPair& p);

struct CapacityBounds {
  double lower;  // bits per feature
  double upper;
};

// Linear-class capacity interval:
//   lower = min{kappa, 1-kappa}/2 log2(1 + (sqrt(1/(2 kappa)) - 1)^2 / s2)
//           - kappa/2
//   upper = (1-kappa)/2 log2(1/s2) + 1/2 log2(1 + s2)
//           - kappa/2 log2((sqrt(1/kappa) - 1)^2 + s2)
CapacityBounds c_linear_bounds(double kappa, double sigma2);

// Affine-class capacity interval. The upper bound replaces 1 + s2 with
// 2 + s2; the lower bound gains a min{., 1/2} cap inside the log for
// kappa < 1/2 and a (1-kappa)/2 prefactor on both branches.
CapacityBounds c_affine_bounds(double kappa, double sigma2);

enum class DdtKind {
  linear_upper,       // [min{M-k-r, k(1 - r/M)}]^+
  linear_lower,       // [min{M-k, k} - r]^+
  linear_conjecture,  // min{M-k, k} [1 - r/(M-k)]^+
  affine,             // [M - k - r]^+
};

struct DdtCurve {
  DdtKind kind;
  Index m;
  Index k;  // 1 <= k < m
};

// Diversity gain d(r) of the named piecewise-linear curve; always >= 0.
double ddt_eval(const DdtCurve& curve, double r);

// Almost-sure limit (1 - sqrt(kappa))^2 of the smallest eigenvalue of
// (1/M) W with W ~ Wishart_k(M, I) and kappa = k/M.
double wishart_min_eig_limit(double kappa);

// max{1, min{floor((1/sigma2)^((m - k_model)/2)), l_max}}: the number of
// classes the capacity upper bound predicts discriminable at m features.
// Defaults (k_model = 9, l_max = 38) via the caller.
std::int64_t predicted_classes(double sigma2, Index m, Index k_model,
                               std::int64_t l_max);

}  // namespace grasscap
