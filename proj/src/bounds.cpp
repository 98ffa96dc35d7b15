#include "grasscap/bounds.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <string>

#include "grasscap/numeric.hpp"

namespace grasscap {

namespace {

double checked_log_det(const Eigen::LLT<Matrix>& llt, const char* which) {
  if (llt.info() != Eigen::Success)
    throw FactorizationError(std::string("bhattacharyya_distance: ") + which +
                             " covariance not positive definite");
  double log_det = 0.0;
  for (Index i = 0; i < llt.matrixLLT().rows(); ++i)
    log_det += std::log(llt.matrixLLT()(i, i));
  return 2.0 * log_det;
}

void check_symmetric(const Matrix& s, const char* which) {
  if (s.rows() != s.cols())
    throw DimensionError(std::string("bhattacharyya_distance: ") + which +
                         " covariance not square");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError(std::string("bhattacharyya_distance: ") + which +
                      " covariance not symmetric");
}

}  // namespace

double bhattacharyya_distance(const GaussianPair& p) {
  const Index m = p.cov1.rows();
  check_symmetric(p.cov1, "first");
  check_symmetric(p.cov2, "second");
  if (p.cov2.rows() != m || p.mean1.size() != m || p.mean2.size() != m)
    throw DimensionError("bhattacharyya_distance: dimension mismatch");

  Eigen::LLT<Matrix> llt1(p.cov1);
  Eigen::LLT<Matrix> llt2(p.cov2);
  const Matrix avg = 0.5 * (p.cov1 + p.cov2);
  Eigen::LLT<Matrix> llt_avg(avg);
  const double log_det1 = checked_log_det(llt1, "first");
  const double log_det2 = checked_log_det(llt2, "second");
  const double log_det_avg = checked_log_det(llt_avg, "average");

  const Vector delta = p.mean1 - p.mean2;
  const double quad = delta.dot(llt_avg.solve(delta));
  return 0.5 * (log_det_avg - 0.5 * log_det1 - 0.5 * log_det2) + 0.125 * quad;
}

double bhattacharyya_bound(const GaussianPair& p) {
  return 0.5 * std::exp(-bhattacharyya_distance(p));
}

CapacityBounds c_linear_bounds(double kappa, double sigma2) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw DomainError("c_linear_bounds: kappa must lie in (0, 1)");
  if (!(sigma2 > 0.0))
    throw DomainError("c_linear_bounds: sigma2 must be positive");

  const double gap2 = std::pow(std::sqrt(1.0 / (2.0 * kappa)) - 1.0, 2);
  const double lower = std::min(kappa, 1.0 - kappa) / 2.0 *
                           std::log2(1.0 + gap2 / sigma2) -
                       kappa / 2.0;
  const double eig = std::pow(std::sqrt(1.0 / kappa) - 1.0, 2);
  const double upper = (1.0 - kappa) / 2.0 * std::log2(1.0 / sigma2) +
                       0.5 * std::log2(1.0 + sigma2) -
                       kappa / 2.0 * std::log2(eig + sigma2);
  return {lower, upper};
}

CapacityBounds c_affine_bounds(double kappa, double sigma2) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw DomainError("c_affine_bounds: kappa must lie in (0, 1)");
  if (!(sigma2 > 0.0))
    throw DomainError("c_affine_bounds: sigma2 must be positive");

  const double gap2 = std::pow(std::sqrt(1.0 / (2.0 * kappa)) - 1.0, 2);
  const double inner = kappa < 0.5 ? std::min(gap2, 0.5) : gap2;
  const double lower =
      (1.0 - kappa) / 2.0 * std::log2(1.0 + inner / sigma2) - kappa / 2.0;
  const double eig = std::pow(std::sqrt(1.0 / kappa) - 1.0, 2);
  const double upper = (1.0 - kappa) / 2.0 * std::log2(1.0 / sigma2) +
                       0.5 * std::log2(2.0 + sigma2) -
                       kappa / 2.0 * std::log2(eig + sigma2);
  return {lower, upper};
}

double ddt_eval(const DdtCurve& curve, double r) {
  if (curve.k < 1 || curve.k >= curve.m)
    throw DimensionError("ddt_eval: need 1 <= k < m, got k=" +
                         std::to_string(curve.k) +
                         " m=" + std::to_string(curve.m));
  if (!(r >= 0.0)) throw DomainError("ddt_eval: r must be >= 0");

  const double m = static_cast<double>(curve.m);
  const double k = static_cast<double>(curve.k);
  switch (curve.kind) {
    case DdtKind::linear_upper:
      return detail::positive_part(std::min(m - k - r, k * (1.0 - r / m)));
    case DdtKind::linear_lower:
      return detail::positive_part(std::min(m - k, k) - r);
    case DdtKind::linear_conjecture:
      return std::min(m - k, k) * detail::positive_part(1.0 - r / (m - k));
    case DdtKind::affine:
      return detail::positive_part(m - k - r);
  }
  throw DomainError("ddt_eval: unknown curve kind");
}

double wishart_min_eig_limit(double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw DomainError("wishart_min_eig_limit: kappa must lie in (0, 1]");
  const double s = 1.0 - std::sqrt(kappa);
  return s * s;
}

std::int64_t predicted_classes(double sigma2, Index m, Index k_model,
                               std::int64_t l_max) {
  if (!(sigma2 > 0.0))
    throw DomainError("predicted_classes: sigma2 must be positive");
  if (m < 1) throw DomainError("predicted_classes: m must be >= 1");
  if (k_model < 0) throw DomainError("predicted_classes: k_model must be >= 0");
  if (l_max < 1) throw DomainError("predicted_classes: l_max must be >= 1");

  const double expo = static_cast<double>(m - k_model) / 2.0;
  const double v = std::pow(1.0 / sigma2, expo);
  double count;
  if (!std::isfinite(v) || v >= static_cast<double>(l_max))
    count = static_cast<double>(l_max);
  else
    count = std::min(detail::floor_tol(v), static_cast<double>(l_max));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(count));
}

}  // namespace grasscap
