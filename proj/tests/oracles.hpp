// Test-only reference implementations, kept independent of the library's
// computation paths: the likelihood oracle builds the explicit M x M
// covariance and factors it densely.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace oracles {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// log N(y; mean, cov) from the dense covariance via dense Cholesky.
inline double dense_gaussian_logpdf(const Vector& y, const Vector& mean,
                                    const Matrix& cov) {
  const Index m = y.size();
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("oracle: covariance not positive definite");
  double log_det = 0.0;
  for (Index i = 0; i < m; ++i) log_det += std::log(llt.matrixLLT()(i, i));
  log_det *= 2.0;
  const Vector d = y - mean;
  const double quad = d.dot(llt.solve(d));
  constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
  return -0.5 * (static_cast<double>(m) * kLog2Pi + log_det + quad);
}

// Largest principal angle (radians) between the column spans of a and b.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  auto orth = [](const Matrix& x) {
    Eigen::HouseholderQR<Matrix> qr(x);
    return Matrix(qr.householderQ() *
                  Matrix::Identity(x.rows(), std::min(x.rows(), x.cols())));
  };
  const Matrix qa = orth(a);
  const Matrix qb = orth(b);
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, std::max(-1.0, smallest)));
}

}  // namespace oracles
