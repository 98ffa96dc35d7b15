#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "grasscap/ensemble.hpp"
#include "grasscap/estimate.hpp"

namespace grasscap {

// Per-class projected model: everything the likelihood needs. The implied
// observation covariance is Sigma = factor factor^T + sigma2 I_M.
struct ProjectedClass {
  Matrix factor;     // G = Phi * basis, M x k
  Vector proj_mean;  // Phi * mean; zeros for linear classes
};

struct ClassificationResult {
  Index chosen = 0;  // argmax of loglik; ties break toward the smallest index
  Vector loglik;     // one entry per candidate class
};

// factor = Phi * basis, proj_mean = Phi * mean (zeros when mean absent).
ProjectedClass project_class(const SubspaceClass& cls,
                             const FeatureMatrix& phi);

// Dense M x M covariance G G^T + sigma2 I. Handy for bound evaluation.
Matrix dense_covariance(const ProjectedClass& pc, double sigma2);

// log N(y; proj_mean, G G^T + sigma2 I) through the k x k core
// C = sigma2 I_k + G^T G:
//   log|Sigma|   = (M - k) log sigma2 + log|C|
//   Sigma^{-1} d = (d - G C^{-1} G^T d) / sigma2
// O(M k^2 + k^3) instead of O(M^3); valid for any k, including k > M.
double log_likelihood(const Vector& y, const ProjectedClass& pc,
                      double sigma2);

// Maximum-likelihood choice among the classes (equal priors).
ClassificationResult classify(const Vector& y,
                              const std::vector<ProjectedClass>& classes,
                              double sigma2);

// Caches the per-class core factorization so repeated evaluations cost
// O(M k) each. Use this when classifying many observations.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(std::vector<ProjectedClass> classes, double sigma2);

  double log_likelihood(const Vector& y, Index i) const;
  ClassificationResult classify(const Vector& y) const;

  Index num_classes() const { return static_cast<Index>(classes_.size()); }
  Index feature_dim() const { return m_; }
  double sigma2() const { return sigma2_; }
  const ProjectedClass& at(Index i) const {
    return classes_[static_cast<std::size_t>(i)];
  }

 private:
  struct Core {
    Eigen::LLT<Matrix> chol;  // of sigma2 I_k + G^T G
    double log_det_sigma;     // of the full M x M covariance
  };

  std::vector<ProjectedClass> classes_;
  std::vector<Core> cores_;
  double sigma2_;
  Index m_;
};

// Draw from the projected model: y = G h + proj_mean + sqrt(sigma2) z.
// Distributionally identical to sample_signal of the ambient class.
Vector sample_projected(const ProjectedClass& pc, double sigma2,
                        RngStream& rng);

// Equal-prior two-class Monte Carlo error: trials/2 draws from each class
// (the first class takes the extra draw when trials is odd), ML decision
// between the pair. Per-trial derived streams; thread count never changes
// the estimate.
ErrorEstimate pairwise_error_mc(const SubspaceClass& a, const SubspaceClass& b,
                                const FeatureMatrix& phi, double sigma2,
                                std::int64_t trials, RngStream rng,
                                int threads = 1);

}  // namespace grasscap
