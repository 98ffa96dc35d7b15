#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "grasscap/empirical.hpp"
#include "grasscap/pgm.hpp"
#include "oracles.hpp"

using namespace grasscap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("grasscap_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_raw(const fs::path& file, const std::string& header,
               const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(file, std::ios::binary);
  out << header;
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("empirical") {

TEST_CASE("read_pgm decodes a minimal P5 file") {
  TempDir tmp("pgm_min");
  write_raw(tmp.path / "a.pgm", "P5\n2 2\n255\n", {0, 255, 0, 255});
  const PgmImage img = read_pgm(tmp.path / "a.pgm");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  REQUIRE(img.pixels.size() == 4);
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[1] == 255);
  CHECK(img.pixels[2] == 0);
  CHECK(img.pixels[3] == 255);
}

TEST_CASE("read_pgm rejects malformed files") {
  TempDir tmp("pgm_bad");
  write_raw(tmp.path / "p2.pgm", "P2\n2 2\n255\n", {0, 1, 2, 3});
  CHECK_THROWS_AS(read_pgm(tmp.path / "p2.pgm"), ParseError);
  write_raw(tmp.path / "maxval.pgm", "P5\n2 2\n65535\n", {0, 1, 2, 3});
  CHECK_THROWS_AS(read_pgm(tmp.path / "maxval.pgm"), ParseError);
  write_raw(tmp.path / "short.pgm", "P5\n2 2\n255\n", {0, 1});
  CHECK_THROWS_AS(read_pgm(tmp.path / "short.pgm"), ParseError);
  CHECK_THROWS_AS(read_pgm(tmp.path / "missing.pgm"), ParseError);
}

TEST_CASE("pgm round trip") {
  TempDir tmp("pgm_rt");
  PgmImage img;
  img.width = 3;
  img.height = 2;
  img.pixels = {10, 20, 30, 40, 50, 60};
  write_pgm(tmp.path / "rt.pgm", img);
  const PgmImage back = read_pgm(tmp.path / "rt.pgm");
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("load_image_dir builds a labeled corpus") {
  TempDir tmp("corpus");
  for (const char* cls : {"alice", "bob"}) {
    fs::create_directories(tmp.path / cls);
    for (int i = 0; i < 3; ++i) {
      const std::uint8_t base = cls[0] == 'a' ? 0 : 100;
      write_raw(tmp.path / cls / ("img" + std::to_string(i) + ".pgm"),
                "P5\n2 2\n255\n",
                {base, static_cast<std::uint8_t>(base + 51),
                 static_cast<std::uint8_t>(base + 102),
                 static_cast<std::uint8_t>(base + 153)});
    }
  }
  const LabeledImageSet set = load_image_dir(tmp.path);
  CHECK(set.n == 4);
  CHECK(set.num_classes == 2);
  CHECK(set.total_samples() == 6);
  REQUIRE(set.class_counts.size() == 2);
  CHECK(set.class_counts[0] == 3);
  CHECK(set.class_counts[1] == 3);
  CHECK(set.class_names[0] == "alice");  // lexicographic order
  CHECK(set.class_names[1] == "bob");
  // Pixels scaled to [0, 1]: first alice image is (0, 51, 102, 153)/255.
  CHECK(set.images(0, 0) == doctest::Approx(0.0));
  CHECK(set.images(1, 0) == doctest::Approx(51.0 / 255.0));
  CHECK(set.images(3, 0) == doctest::Approx(153.0 / 255.0));
  CHECK(set.labels[0] == 0);
  CHECK(set.labels[5] == 1);
}

TEST_CASE("loader scales the minimal example to (0, 1, 0, 1)") {
  TempDir tmp("corpus_min");
  fs::create_directories(tmp.path / "only");
  write_raw(tmp.path / "only" / "img.pgm", "P5\n2 2\n255\n", {0, 255, 0, 255});
  const LabeledImageSet set = load_image_dir(tmp.path);
  REQUIRE(set.total_samples() == 1);
  Vector expect(4);
  expect << 0.0, 1.0, 0.0, 1.0;
  CHECK((set.images.col(0) - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_image_dir rejects defective corpora") {
  TempDir tmp("corpus_bad");
  fs::create_directories(tmp.path / "empty_class");
  CHECK_THROWS_AS(load_image_dir(tmp.path), DomainError);

  TempDir tmp2("corpus_mixed");
  fs::create_directories(tmp2.path / "c0");
  write_raw(tmp2.path / "c0" / "a.pgm", "P5\n2 2\n255\n", {0, 1, 2, 3});
  write_raw(tmp2.path / "c0" / "b.pgm", "P5\n3 1\n255\n", {0, 1, 2});
  CHECK_THROWS_AS(load_image_dir(tmp2.path), DimensionError);

  CHECK_THROWS_AS(load_image_dir(tmp2.path / "nonexistent"), ParseError);
}

TEST_CASE("split_train_test halves every class deterministically") {
  SyntheticCorpusConfig cfg;
  cfg.n = 16;
  cfg.num_classes = 3;
  cfg.images_per_class = 4;
  cfg.k = 2;
  cfg.sigma2 = 1e-4;
  cfg.seed = 5;
  LabeledImageSet set = make_synthetic_corpus(cfg);
  auto [train, test] = split_train_test(set, 99);
  for (Index c = 0; c < 3; ++c) {
    CHECK(train.class_counts[static_cast<std::size_t>(c)] == 2);
    CHECK(test.class_counts[static_cast<std::size_t>(c)] == 2);
  }

  auto [train2, test2] = split_train_test(set, 99);
  CHECK((train.images - train2.images).cwiseAbs().maxCoeff() == 0.0);
  CHECK((test.images - test2.images).cwiseAbs().maxCoeff() == 0.0);

  // Odd counts put the extra sample into train.
  cfg.images_per_class = 5;
  LabeledImageSet odd = make_synthetic_corpus(cfg);
  auto [otrain, otest] = split_train_test(odd, 1);
  CHECK(otrain.class_counts[0] == 3);
  CHECK(otest.class_counts[0] == 2);
}

TEST_CASE("split_train_test needs two samples per class") {
  SyntheticCorpusConfig cfg;
  cfg.n = 8;
  cfg.num_classes = 2;
  cfg.images_per_class = 1;
  cfg.k = 1;
  const LabeledImageSet set = make_synthetic_corpus(cfg);
  CHECK_THROWS_AS(split_train_test(set, 0), DomainError);
}

TEST_CASE("estimate_subspace on rank-1 data recovers the direction") {
  Vector e = Vector::Zero(6);
  e(2) = 1.0;
  Matrix train(6, 4);
  for (Index j = 0; j < 4; ++j) train.col(j) = e * (1.0 + static_cast<double>(j));
  const EstimatedClassModel model = estimate_subspace(train, 1);
  CHECK(std::fabs(std::fabs(model.directions.col(0).dot(e)) - 1.0) <= 1e-12);
}

TEST_CASE("estimate_subspace reproduces an exact plane") {
  RngStream rng(6);
  Matrix span(8, 2);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 2; ++j) span(i, j) = rng.normal();
  Matrix train(8, 10);
  for (Index j = 0; j < 10; ++j) {
    Vector c(2);
    c << rng.normal(), rng.normal();
    train.col(j) = span * c;
  }
  const EstimatedClassModel model = estimate_subspace(train, 2);
  // Every training vector projects onto the estimated span with no residual.
  const Matrix q = model.directions;
  for (Index j = 0; j < 10; ++j) {
    const Vector x = train.col(j);
    const Vector resid = x - q * (q.transpose() * x);
    REQUIRE(resid.norm() <= 1e-8);
  }
  // Directions orthonormal before energy scaling.
  const Matrix gram = q.transpose() * q;
  CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("estimate_subspace recovers a noisy rank-9 class to 5 degrees") {
  const Index n = 1024;
  const Index k = 9;
  const SubspaceClass truth = draw_linear_class(n, k, RngStream(7));
  RngStream rng(8);
  Matrix train(n, 30);
  const double sigma = std::sqrt(1e-4);
  for (Index j = 0; j < 30; ++j) {
    Vector h(k);
    for (Index i = 0; i < k; ++i) h(i) = rng.normal();
    Vector x = truth.basis * h;
    for (Index i = 0; i < n; ++i) x(i) += sigma * rng.normal();
    train.col(j) = x;
  }
  const EstimatedClassModel model = estimate_subspace(train, k);
  const double angle = oracles::max_principal_angle(truth.basis, model.directions);
  CHECK(angle <= 5.0 * 3.14159265358979 / 180.0);
}

TEST_CASE("estimate_subspace validates k_model") {
  Matrix train = Matrix::Random(6, 3);
  CHECK_THROWS_AS(estimate_subspace(train, 4), DimensionError);
  CHECK_THROWS_AS(estimate_subspace(train, 0), DimensionError);
  CHECK_THROWS_AS(estimate_subspace(Matrix(6, 0), 1), DimensionError);
}

TEST_CASE("estimate_noise_power endpoints") {
  // Identity features in R^3, one class spanned by e0; an image inside the
  // span contributes zero, one orthogonal with |x|^2 = M contributes one.
  const Index m = 3;
  EstimatedClassModel model;
  model.directions = Matrix::Identity(3, 3).leftCols(1);
  model.scales = Vector::Ones(1);
  model.k_model = 1;

  LabeledImageSet inside;
  inside.n = 3;
  inside.num_classes = 1;
  inside.images = Matrix::Zero(3, 1);
  inside.images(0, 0) = 2.5;
  inside.labels = {0};
  inside.class_counts = {1};
  const FeatureMatrix phi(Matrix::Identity(m, m));
  CHECK(estimate_noise_power(inside, {model}, phi) <= 1e-18);

  LabeledImageSet outside = inside;
  outside.images = Matrix::Zero(3, 1);
  outside.images(1, 0) = std::sqrt(1.5);
  outside.images(2, 0) = std::sqrt(1.5);  // |x|^2 = 3 = M, orthogonal to e0
  CHECK(estimate_noise_power(outside, {model}, phi) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_noise_power recovers the synthetic noise level") {
  SyntheticCorpusConfig cfg;
  cfg.n = 256;
  cfg.num_classes = 4;
  cfg.images_per_class = 40;
  cfg.k = 5;
  cfg.sigma2 = 0.01;
  cfg.seed = 9;
  const LabeledImageSet set = make_synthetic_corpus(cfg);
  auto [train, test] = split_train_test(set, 10);
  std::vector<EstimatedClassModel> models;
  for (Index c = 0; c < 4; ++c) {
    const std::vector<Index> cols = train.indices_of(c);
    Matrix x(set.n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      x.col(static_cast<Index>(j)) = train.images.col(cols[j]);
    models.push_back(estimate_subspace(x, 5));
  }
  const FeatureMatrix phi = draw_feature_matrix(64, 256, RngStream(11));
  const double s2 = estimate_noise_power(test, models, phi);
  CHECK(s2 == doctest::Approx(0.01).epsilon(0.20));
}

TEST_CASE("estimate_noise_power is exactly zero on noiseless data") {
  SyntheticCorpusConfig cfg;
  cfg.n = 64;
  cfg.num_classes = 2;
  cfg.images_per_class = 12;
  cfg.k = 3;
  cfg.sigma2 = 0.0;
  cfg.seed = 12;
  const LabeledImageSet set = make_synthetic_corpus(cfg);
  auto [train, test] = split_train_test(set, 13);
  std::vector<EstimatedClassModel> models;
  for (Index c = 0; c < 2; ++c) {
    const std::vector<Index> cols = train.indices_of(c);
    Matrix x(set.n, static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      x.col(static_cast<Index>(j)) = train.images.col(cols[j]);
    models.push_back(estimate_subspace(x, 3));
  }
  const FeatureMatrix phi = draw_feature_matrix(16, 64, RngStream(14));
  CHECK(estimate_noise_power(test, models, phi) <= 1e-18);
}

TEST_CASE("make_synthetic_corpus shapes and determinism") {
  SyntheticCorpusConfig cfg;
  cfg.n = 32;
  cfg.num_classes = 3;
  cfg.images_per_class = 5;
  cfg.k = 2;
  cfg.sigma2 = 1e-3;
  cfg.seed = 15;
  const LabeledImageSet a = make_synthetic_corpus(cfg);
  const LabeledImageSet b = make_synthetic_corpus(cfg);
  CHECK(a.total_samples() == 15);
  CHECK(a.num_classes == 3);
  CHECK((a.images - b.images).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_face_experiment on a small synthetic corpus") {
  SyntheticCorpusConfig cfg;
  cfg.n = 128;
  cfg.num_classes = 4;
  cfg.images_per_class = 16;
  cfg.k = 3;
  cfg.sigma2 = 1e-4;
  cfg.seed = 16;
  const LabeledImageSet set = make_synthetic_corpus(cfg);

  FaceExperimentConfig fc;
  fc.m_grid = {4, 8, 16};
  fc.l_grid = {1, 2, 4};
  fc.k_model = 3;
  fc.seed = 17;
  const FaceExperimentResult result = run_face_experiment(set, fc);

  REQUIRE(result.error_rate.rows() == 3);
  REQUIRE(result.error_rate.cols() == 3);
  // A single class cannot be misclassified.
  for (Index mi = 0; mi < 3; ++mi) CHECK(result.error_rate(mi, 0) == 0.0);
  // Trials: L=1 sees 8 test images, L=4 all 32.
  CHECK(result.trials(0, 0) == 8);
  CHECK(result.trials(0, 2) == 32);
  CHECK(result.sigma2_hat.size() == 3);
  for (double s2 : result.sigma2_hat) CHECK(s2 >= 0.0);

  // Discriminable class count grows with the number of features.
  for (std::size_t mi = 1; mi < result.max_l_empirical.size(); ++mi)
    CHECK(result.max_l_empirical[mi] >= result.max_l_empirical[mi - 1]);

  const FaceExperimentResult again = run_face_experiment(set, fc);
  CHECK((result.error_rate - again.error_rate).cwiseAbs().maxCoeff() == 0.0);
  CHECK(result.max_l_empirical == again.max_l_empirical);
  CHECK(result.predicted == again.predicted);
}

TEST_CASE("run_face_experiment validates grids") {
  SyntheticCorpusConfig cfg;
  cfg.n = 16;
  cfg.num_classes = 2;
  cfg.images_per_class = 4;
  cfg.k = 1;
  const LabeledImageSet set = make_synthetic_corpus(cfg);
  FaceExperimentConfig fc;
  fc.m_grid = {4};
  fc.l_grid = {3};  // more classes than the corpus has
  fc.k_model = 1;
  CHECK_THROWS_AS(run_face_experiment(set, fc), DomainError);
  fc.l_grid = {2};
  fc.m_grid = {};
  CHECK_THROWS_AS(run_face_experiment(set, fc), DomainError);
  fc.m_grid = {32};  // exceeds N = 16
  CHECK_THROWS_AS(run_face_experiment(set, fc), DimensionError);
}

}  // TEST_SUITE
