#include "grasscap/empirical.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "grasscap/bounds.hpp"
#include "grasscap/pgm.hpp"

namespace grasscap {

namespace fs = std::filesystem;

std::vector<Index> LabeledImageSet::indices_of(Index label) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(static_cast<Index>(i));
  return out;
}

LabeledImageSet load_image_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw ParseError(dir.string() + ": not a directory");

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty())
    throw ParseError(dir.string() + ": no class subdirectories");

  LabeledImageSet set;
  set.num_classes = static_cast<Index>(class_dirs.size());
  std::vector<std::vector<double>> columns;
  for (Index label = 0; label < set.num_classes; ++label) {
    const fs::path& cdir = class_dirs[static_cast<std::size_t>(label)];
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cdir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw DomainError(cdir.string() + ": empty class directory");

    for (const auto& file : files) {
      const PgmImage img = read_pgm(file);
      const Index n = img.width * img.height;
      if (set.n == 0)
        set.n = n;
      else if (n != set.n)
        throw DimensionError(file.string() + ": image has " +
                             std::to_string(n) + " pixels, corpus has " +
                             std::to_string(set.n));
      std::vector<double> col(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < col.size(); ++i)
        col[i] = static_cast<double>(img.pixels[i]) / 255.0;
      columns.push_back(std::move(col));
      set.labels.push_back(label);
    }
    set.class_counts.push_back(
        static_cast<Index>(files.size()));
    set.class_names.push_back(cdir.filename().string());
  }

  set.images.resize(set.n, static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (Index i = 0; i < set.n; ++i)
      set.images(i, static_cast<Index>(j)) =
          columns[j][static_cast<std::size_t>(i)];
  return set;
}

namespace {

LabeledImageSet subset_by_columns(const LabeledImageSet& set,
                                  const std::vector<Index>& cols) {
  LabeledImageSet out;
  out.n = set.n;
  out.num_classes = set.num_classes;
  out.class_names = set.class_names;
  out.class_counts.assign(static_cast<std::size_t>(set.num_classes), 0);
  out.images.resize(set.n, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.images.col(static_cast<Index>(j)) = set.images.col(cols[j]);
    const Index label = set.labels[static_cast<std::size_t>(cols[j])];
    out.labels.push_back(label);
    ++out.class_counts[static_cast<std::size_t>(label)];
  }
  return out;
}

}  // namespace

std::pair<LabeledImageSet, LabeledImageSet> split_train_test(
    const LabeledImageSet& set, std::uint64_t seed) {
  std::vector<Index> train_cols;
  std::vector<Index> test_cols;
  const RngStream root(seed);
  for (Index label = 0; label < set.num_classes; ++label) {
    std::vector<Index> cols = set.indices_of(label);
    if (cols.size() < 2)
      throw DomainError("split_train_test: class " + std::to_string(label) +
                        " has " + std::to_string(cols.size()) +
                        " sample(s), need >= 2");
    RngStream rng = root.derive(static_cast<std::uint64_t>(label));
    for (std::size_t i = cols.size() - 1; i > 0; --i)
      std::swap(cols[i], cols[rng.uniform_below(i + 1)]);
    const std::size_t n_train = (cols.size() + 1) / 2;
    std::vector<Index> tr(cols.begin(),
                          cols.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<Index> te(cols.begin() + static_cast<std::ptrdiff_t>(n_train),
                          cols.end());
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    train_cols.insert(train_cols.end(), tr.begin(), tr.end());
    test_cols.insert(test_cols.end(), te.begin(), te.end());
  }
  return {subset_by_columns(set, train_cols), subset_by_columns(set, test_cols)};
}

EstimatedClassModel estimate_subspace(const Matrix& train_columns,
                                      Index k_model) {
  const Index n = train_columns.rows();
  const Index count = train_columns.cols();
  if (count < 1)
    throw DimensionError("estimate_subspace: no training vectors");
  if (k_model < 1 || k_model > std::min(n, count))
    throw DimensionError("estimate_subspace: k_model=" +
                         std::to_string(k_model) + " exceeds min(n=" +
                         std::to_string(n) + ", count=" +
                         std::to_string(count) + ")");

  Eigen::BDCSVD<Matrix> svd(train_columns, Eigen::ComputeThinU);
  EstimatedClassModel model;
  model.k_model = k_model;
  model.directions = svd.matrixU().leftCols(k_model);
  model.scales = svd.singularValues().head(k_model) /
                 std::sqrt(static_cast<double>(count));
  return model;
}

double estimate_noise_power(const LabeledImageSet& test,
                            const std::vector<EstimatedClassModel>& models,
                            const FeatureMatrix& phi) {
  if (phi.ambient_dim() != test.n)
    throw DimensionError("estimate_noise_power: feature N=" +
                         std::to_string(phi.ambient_dim()) + " vs corpus N=" +
                         std::to_string(test.n));
  if (static_cast<Index>(models.size()) < test.num_classes)
    throw DimensionError("estimate_noise_power: missing class models");
  const Index m = phi.feature_dim();

  // Orthonormal span of Phi * directions per class, once.
  std::vector<Matrix> spans;
  spans.reserve(models.size());
  for (const auto& model : models) {
    if (model.directions.rows() != test.n)
      throw DimensionError("estimate_noise_power: model dimension mismatch");
    const Matrix b = phi.rows() * model.directions;
    Eigen::HouseholderQR<Matrix> qr(b);
    const Index rank = std::min(m, b.cols());
    spans.push_back(qr.householderQ() * Matrix::Identity(m, rank));
  }

  double accum = 0.0;
  for (Index j = 0; j < test.total_samples(); ++j) {
    const Index label = test.labels[static_cast<std::size_t>(j)];
    const auto& model = models[static_cast<std::size_t>(label)];
    Vector v = phi.rows() * test.images.col(j);
    if (model.mean.size() > 0) v -= phi.rows() * model.mean;
    const Matrix& q = spans[static_cast<std::size_t>(label)];
    const Vector resid = v - q * (q.transpose() * v);
    accum += resid.squaredNorm() / static_cast<double>(m);
  }
  return accum / static_cast<double>(test.total_samples());
}

FaceExperimentResult run_face_experiment(const LabeledImageSet& set,
                                         const FaceExperimentConfig& config) {
  if (config.m_grid.empty() || config.l_grid.empty())
    throw DomainError("run_face_experiment: empty grid");
  if (*std::max_element(config.l_grid.begin(), config.l_grid.end()) >
      set.num_classes)
    throw DomainError("run_face_experiment: l_grid exceeds class count");
  if (!(config.tau > 0.0 && config.tau <= 1.0))
    throw DomainError("run_face_experiment: tau must lie in (0, 1]");
  for (Index m : config.m_grid)
    if (m < 1 || m > set.n)
      throw DimensionError("run_face_experiment: m_grid entry " +
                           std::to_string(m) + " outside [1, N]");

  auto [train, test] = split_train_test(set, config.seed);

  std::vector<EstimatedClassModel> models;
  models.reserve(static_cast<std::size_t>(set.num_classes));
  for (Index label = 0; label < set.num_classes; ++label) {
    const std::vector<Index> cols = train.indices_of(label);
    Matrix x(set.n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      x.col(static_cast<Index>(j)) = train.images.col(cols[j]);
    if (config.affine_means) {
      const Vector mean = x.rowwise().mean();
      x.colwise() -= mean;
      EstimatedClassModel model = estimate_subspace(x, config.k_model);
      model.mean = mean;
      models.push_back(std::move(model));
    } else {
      models.push_back(estimate_subspace(x, config.k_model));
    }
  }

  const Index n_m = static_cast<Index>(config.m_grid.size());
  const Index n_l = static_cast<Index>(config.l_grid.size());
  FaceExperimentResult result;
  result.m_grid = config.m_grid;
  result.l_grid = config.l_grid;
  result.errors = CountMatrix::Zero(n_m, n_l);
  result.trials = CountMatrix::Zero(n_m, n_l);
  result.error_rate = Matrix::Zero(n_m, n_l);
  result.tau = config.tau;

  const RngStream root(config.seed);
  for (Index mi = 0; mi < n_m; ++mi) {
    const Index m = config.m_grid[static_cast<std::size_t>(mi)];
    const FeatureMatrix phi = draw_feature_matrix(
        m, set.n, root.derive(1).derive(static_cast<std::uint64_t>(m)));
    const double sigma2_hat = estimate_noise_power(test, models, phi);
    result.sigma2_hat.push_back(sigma2_hat);
    // When M <= k_model the projected spans cover all of R^M and the
    // residual estimate degenerates to zero; floor it so the likelihood
    // stays well-posed.
    const double sigma2_used = std::max(sigma2_hat, 1e-12);

    std::vector<ProjectedClass> projected;
    projected.reserve(models.size());
    for (const auto& model : models) {
      ProjectedClass pc;
      pc.factor = phi.rows() * model.scaled_basis();
      pc.proj_mean = model.mean.size() > 0 ? Vector(phi.rows() * model.mean)
                                           : Vector(Vector::Zero(m));
      projected.push_back(std::move(pc));
    }

    for (Index li = 0; li < n_l; ++li) {
      const Index l = config.l_grid[static_cast<std::size_t>(li)];
      const LikelihoodEvaluator eval(
          std::vector<ProjectedClass>(projected.begin(),
                                      projected.begin() + l),
          sigma2_used);
      std::int64_t errors = 0;
      std::int64_t trials = 0;
      for (Index j = 0; j < test.total_samples(); ++j) {
        const Index label = test.labels[static_cast<std::size_t>(j)];
        if (label >= l) continue;
        Vector y = phi.rows() * test.images.col(j);
        errors += eval.classify(y).chosen != label;
        ++trials;
      }
      result.errors(mi, li) = errors;
      result.trials(mi, li) = trials;
      result.error_rate(mi, li) =
          trials > 0 ? static_cast<double>(errors) / static_cast<double>(trials)
                     : 0.0;
    }

    Index best = 1;
    for (Index li = 0; li < n_l; ++li)
      if (result.error_rate(mi, li) < config.tau)
        best = std::max(best, config.l_grid[static_cast<std::size_t>(li)]);
    result.max_l_empirical.push_back(best);
    result.predicted.push_back(predicted_classes(
        sigma2_used, m, config.k_model,
        static_cast<std::int64_t>(set.num_classes)));
  }
  return result;
}

LabeledImageSet make_synthetic_corpus(const SyntheticCorpusConfig& config) {
  if (config.n < 1 || config.num_classes < 1 || config.images_per_class < 1)
    throw DomainError("make_synthetic_corpus: counts must be >= 1");
  if (config.k < 1 || config.k > config.n)
    throw DimensionError("make_synthetic_corpus: need 1 <= k <= n");
  if (config.sigma2 < 0.0)
    throw DomainError("make_synthetic_corpus: sigma2 must be >= 0");

  LabeledImageSet set;
  set.n = config.n;
  set.num_classes = config.num_classes;
  set.images.resize(config.n, config.num_classes * config.images_per_class);
  const double sigma = std::sqrt(config.sigma2);
  const RngStream root(config.seed);

  Index col = 0;
  for (Index label = 0; label < config.num_classes; ++label) {
    const SubspaceClass cls = draw_linear_class(
        config.n, config.k, root.derive(static_cast<std::uint64_t>(label)));
    RngStream image_rng =
        root.derive(static_cast<std::uint64_t>(label)).derive(1);
    for (Index j = 0; j < config.images_per_class; ++j) {
      RngStream rng = image_rng.derive(static_cast<std::uint64_t>(j));
      Vector h(config.k);
      for (Index i = 0; i < config.k; ++i) h(i) = rng.normal();
      Vector x = cls.basis * h;
      if (sigma > 0.0)
        for (Index i = 0; i < config.n; ++i) x(i) += sigma * rng.normal();
      set.images.col(col) = x;
      set.labels.push_back(label);
      ++col;
    }
    set.class_counts.push_back(config.images_per_class);
    set.class_names.push_back("class" + std::to_string(label));
  }
  return set;
}

}  // namespace grasscap
