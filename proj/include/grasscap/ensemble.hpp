#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "grasscap/errors.hpp"
#include "grasscap/rng.hpp"

namespace grasscap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// One class of the ensemble: a Gaussian supported (up to noise) on the
// k-dimensional subspace spanned by the basis columns, translated by the
// mean when present. Absent mean <=> linear class.
struct SubspaceClass {
  Matrix basis;                // N x k
  std::optional<Vector> mean;  // length N

  Index ambient_dim() const { return basis.rows(); }
  Index subspace_dim() const { return basis.cols(); }
  bool is_affine() const { return mean.has_value(); }
};

// Feature extractor with orthonormal rows (operator norm 1). Validated at
// construction: max |Phi Phi^T - I| <= 1e-10.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix rows);

  const Matrix& rows() const { return rows_; }
  Index feature_dim() const { return rows_.rows(); }  // M
  Index ambient_dim() const { return rows_.cols(); }  // N

 private:
  Matrix rows_;
};

// Asymptotic-regime ratios: N = floor(nu M), k = floor(kappa M),
// L = floor(2^(rho M)) or L = floor((1/sigma2)^(r/2)).
struct ScalingParams {
  double nu = 1.0;     // >= 1
  double kappa = 0.5;  // in (0, 1)
  double rho = 0.0;    // >= 0, bits per feature
  double r = 0.0;      // >= 0, discrimination gain
};

struct ScaledDims {
  Index n;
  Index k;
  std::int64_t l;
};

// Max |Phi Phi^T - I|; the orthonormality defect checked by FeatureMatrix.
double orthonormality_defect(const Matrix& rows);

// Basis entries i.i.d. N(0, 1/k); no mean.
SubspaceClass draw_linear_class(Index n, Index k, RngStream rng);

// Basis as draw_linear_class; mean entries i.i.d. N(0, 1).
SubspaceClass draw_affine_class(Index n, Index k, RngStream rng);

// Haar-distributed orthonormal rows: orthonormalize an n x m standard
// Gaussian matrix (QR with sign-fixed R diagonal) and transpose. O(n m^2);
// never materializes an n x n matrix.
FeatureMatrix draw_feature_matrix(Index m, Index n, RngStream rng);

// y = Phi (U h + mu) + z with h ~ N(0, I_k) and z ~ N(0, sigma2 I_M).
Vector sample_signal(const SubspaceClass& cls, const FeatureMatrix& phi,
                     double sigma2, RngStream rng);

// max(1, floor((1/sigma2)^(r/2))), saturating at INT64_MAX.
std::int64_t num_classes_for(double sigma2, double r);

// n = floor(nu m), k = max(1, floor(kappa m)), l = max(2, floor(2^(rho m))).
// Throws OverflowError when 2^(rho m) exceeds 64-bit counts.
ScaledDims dims_for(Index m, const ScalingParams& p);

}  // namespace grasscap
