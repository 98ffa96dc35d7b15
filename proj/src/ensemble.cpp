#include "grasscap/ensemble.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <string>

#include "grasscap/numeric.hpp"

namespace grasscap {

namespace {

// Fills row-major so the draw order is part of the determinism contract.
Matrix gaussian_matrix(Index rows, Index cols, double stddev, RngStream& rng) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = stddev * rng.normal();
  return out;
}

}  // namespace

double orthonormality_defect(const Matrix& rows) {
  const Matrix gram = rows * rows.transpose();
  return (gram - Matrix::Identity(rows.rows(), rows.rows()))
      .cwiseAbs()
      .maxCoeff();
}

FeatureMatrix::FeatureMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.rows() > rows_.cols())
    throw DimensionError("FeatureMatrix: need 1 <= M <= N, got M=" +
                         std::to_string(rows_.rows()) +
                         " N=" + std::to_string(rows_.cols()));
  if (!rows_.allFinite())
    throw DomainError("FeatureMatrix: non-finite entries");
  const double defect = orthonormality_defect(rows_);
  if (defect > 1e-10)
    throw DomainError("FeatureMatrix: rows not orthonormal, defect=" +
                      std::to_string(defect));
}

SubspaceClass draw_linear_class(Index n, Index k, RngStream rng) {
  if (k < 1 || k > n)
    throw DimensionError("draw_linear_class: need 1 <= k <= n, got k=" +
                         std::to_string(k) + " n=" + std::to_string(n));
  const double stddev = 1.0 / std::sqrt(static_cast<double>(k));
  return SubspaceClass{gaussian_matrix(n, k, stddev, rng), std::nullopt};
}

SubspaceClass draw_affine_class(Index n, Index k, RngStream rng) {
  if (k < 1 || k > n)
    throw DimensionError("draw_affine_class: need 1 <= k <= n, got k=" +
                         std::to_string(k) + " n=" + std::to_string(n));
  const double stddev = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix basis = gaussian_matrix(n, k, stddev, rng);
  Vector mean(n);
  for (Index i = 0; i < n; ++i) mean(i) = rng.normal();
  return SubspaceClass{std::move(basis), std::move(mean)};
}

FeatureMatrix draw_feature_matrix(Index m, Index n, RngStream rng) {
  if (m < 1 || m > n)
    throw DimensionError("draw_feature_matrix: need 1 <= m <= n, got m=" +
                         std::to_string(m) + " n=" + std::to_string(n));
  Matrix a = gaussian_matrix(n, m, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  // Sign-fix against the R diagonal; Q is then Haar, not just orthonormal.
  for (Index j = 0; j < m; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  return FeatureMatrix(q.transpose());
}

Vector sample_signal(const SubspaceClass& cls, const FeatureMatrix& phi,
                     double sigma2, RngStream rng) {
  if (cls.ambient_dim() != phi.ambient_dim())
    throw DimensionError("sample_signal: class N=" +
                         std::to_string(cls.ambient_dim()) +
                         " vs feature N=" + std::to_string(phi.ambient_dim()));
  if (cls.mean && cls.mean->size() != cls.ambient_dim())
    throw DimensionError("sample_signal: mean length mismatch");
  if (!(sigma2 > 0.0))
    throw DomainError("sample_signal: sigma2 must be positive");

  const Index k = cls.subspace_dim();
  const Index m = phi.feature_dim();
  Vector h(k);
  for (Index i = 0; i < k; ++i) h(i) = rng.normal();
  Vector x = cls.basis * h;
  if (cls.mean) x += *cls.mean;
  Vector y = phi.rows() * x;
  const double sigma = std::sqrt(sigma2);
  for (Index i = 0; i < m; ++i) y(i) += sigma * rng.normal();
  return y;
}

std::int64_t num_classes_for(double sigma2, double r) {
  if (!(sigma2 > 0.0))
    throw DomainError("num_classes_for: sigma2 must be positive");
  if (!(r >= 0.0)) throw DomainError("num_classes_for: r must be >= 0");
  const double v = detail::floor_tol(std::pow(1.0 / sigma2, r / 2.0));
  if (!(v < 9.223372036854775e18))
    return std::numeric_limits<std::int64_t>::max();
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
}

ScaledDims dims_for(Index m, const ScalingParams& p) {
  if (m < 1) throw DomainError("dims_for: m must be >= 1");
  if (!(p.nu >= 1.0)) throw DomainError("dims_for: nu must be >= 1");
  if (!(p.kappa > 0.0 && p.kappa < 1.0))
    throw DomainError("dims_for: kappa must lie in (0, 1)");
  if (!(p.rho >= 0.0)) throw DomainError("dims_for: rho must be >= 0");

  const double md = static_cast<double>(m);
  const Index n = static_cast<Index>(detail::floor_tol(p.nu * md));
  const Index k =
      std::max<Index>(1, static_cast<Index>(detail::floor_tol(p.kappa * md)));
  const double lexp = p.rho * md;
  if (lexp >= 63.0)
    throw OverflowError("dims_for: L = 2^" + std::to_string(lexp) +
                        " exceeds 64-bit counts");
  const std::int64_t l = std::max<std::int64_t>(
      2, static_cast<std::int64_t>(detail::floor_tol(std::exp2(lexp))));
  return ScaledDims{n, k, l};
}

}  // namespace grasscap
