#include "grasscap/classifier.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "grasscap/parallel.hpp"

namespace grasscap {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

ProjectedClass project_class(const SubspaceClass& cls,
                             const FeatureMatrix& phi) {
  if (cls.ambient_dim() != phi.ambient_dim())
    throw DimensionError("project_class: class N=" +
                         std::to_string(cls.ambient_dim()) +
                         " vs feature N=" + std::to_string(phi.ambient_dim()));
  if (cls.mean && cls.mean->size() != cls.ambient_dim())
    throw DimensionError("project_class: mean length mismatch");
  ProjectedClass pc;
  pc.factor = phi.rows() * cls.basis;
  pc.proj_mean = cls.mean ? Vector(phi.rows() * *cls.mean)
                          : Vector(Vector::Zero(phi.feature_dim()));
  return pc;
}

Matrix dense_covariance(const ProjectedClass& pc, double sigma2) {
  const Index m = pc.factor.rows();
  return pc.factor * pc.factor.transpose() + sigma2 * Matrix::Identity(m, m);
}

LikelihoodEvaluator::LikelihoodEvaluator(std::vector<ProjectedClass> classes,
                                         double sigma2)
    : classes_(std::move(classes)), sigma2_(sigma2) {
  if (classes_.empty())
    throw DimensionError("LikelihoodEvaluator: empty class list");
  if (!(sigma2_ > 0.0))
    throw DomainError("LikelihoodEvaluator: sigma2 must be positive");
  m_ = classes_.front().factor.rows();
  cores_.reserve(classes_.size());
  for (const auto& pc : classes_) {
    if (pc.factor.rows() != m_ || pc.proj_mean.size() != m_)
      throw DimensionError("LikelihoodEvaluator: inconsistent feature dims");
    if (pc.factor.cols() < 1)
      throw DimensionError("LikelihoodEvaluator: k must be >= 1");
    if (!pc.factor.allFinite() || !pc.proj_mean.allFinite())
      throw DomainError("LikelihoodEvaluator: non-finite class model");
    const Index k = pc.factor.cols();
    Matrix c = pc.factor.transpose() * pc.factor;
    c.diagonal().array() += sigma2_;
    Core core;
    core.chol.compute(c);
    if (core.chol.info() != Eigen::Success)
      throw FactorizationError("LikelihoodEvaluator: core not positive definite");
    double log_det_core = 0.0;
    for (Index i = 0; i < k; ++i)
      log_det_core += std::log(core.chol.matrixLLT()(i, i));
    log_det_core *= 2.0;
    core.log_det_sigma =
        static_cast<double>(m_ - k) * std::log(sigma2_) + log_det_core;
    cores_.push_back(std::move(core));
  }
}

double LikelihoodEvaluator::log_likelihood(const Vector& y, Index i) const {
  if (y.size() != m_)
    throw DimensionError("log_likelihood: observation length " +
                         std::to_string(y.size()) + ", expected " +
                         std::to_string(m_));
  if (!y.allFinite()) throw DomainError("log_likelihood: non-finite input");
  const auto& pc = classes_[static_cast<std::size_t>(i)];
  const auto& core = cores_[static_cast<std::size_t>(i)];
  const Vector d = y - pc.proj_mean;
  const Vector w = pc.factor.transpose() * d;
  const double quad =
      (d.squaredNorm() - w.dot(core.chol.solve(w))) / sigma2_;
  return -0.5 * (static_cast<double>(m_) * kLog2Pi + core.log_det_sigma +
                 quad);
}

ClassificationResult LikelihoodEvaluator::classify(const Vector& y) const {
  ClassificationResult res;
  res.loglik.resize(num_classes());
  Index best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < num_classes(); ++i) {
    const double ll = log_likelihood(y, i);
    res.loglik(i) = ll;
    if (ll > best_ll) {  // strict: ties stay at the smallest index
      best_ll = ll;
      best = i;
    }
  }
  res.chosen = best;
  return res;
}

double log_likelihood(const Vector& y, const ProjectedClass& pc,
                      double sigma2) {
  return LikelihoodEvaluator({pc}, sigma2).log_likelihood(y, 0);
}

ClassificationResult classify(const Vector& y,
                              const std::vector<ProjectedClass>& classes,
                              double sigma2) {
  return LikelihoodEvaluator(classes, sigma2).classify(y);
}

Vector sample_projected(const ProjectedClass& pc, double sigma2,
                        RngStream& rng) {
  const Index k = pc.factor.cols();
  const Index m = pc.factor.rows();
  Vector h(k);
  for (Index i = 0; i < k; ++i) h(i) = rng.normal();
  Vector y = pc.factor * h + pc.proj_mean;
  const double sigma = std::sqrt(sigma2);
  for (Index i = 0; i < m; ++i) y(i) += sigma * rng.normal();
  return y;
}

ErrorEstimate pairwise_error_mc(const SubspaceClass& a, const SubspaceClass& b,
                                const FeatureMatrix& phi, double sigma2,
                                std::int64_t trials, RngStream rng,
                                int threads) {
  if (trials < 1) throw DomainError("pairwise_error_mc: trials must be >= 1");
  const LikelihoodEvaluator eval({project_class(a, phi), project_class(b, phi)},
                                 sigma2);
  const std::int64_t from_a = trials - trials / 2;

  std::vector<std::uint8_t> failed(static_cast<std::size_t>(trials), 0);
  parallel_for(trials, threads, [&](std::int64_t t) {
    RngStream trial_rng = rng.derive(static_cast<std::uint64_t>(t));
    const Index truth = t < from_a ? 0 : 1;
    const Vector y = sample_projected(eval.at(truth), sigma2, trial_rng);
    failed[static_cast<std::size_t>(t)] = eval.classify(y).chosen != truth;
  });

  std::int64_t errors = 0;
  for (auto f : failed) errors += f;
  return make_error_estimate(errors, trials);
}

}  // namespace grasscap
