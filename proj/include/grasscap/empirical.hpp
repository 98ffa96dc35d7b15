#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "grasscap/classifier.hpp"
#include "grasscap/ensemble.hpp"

namespace grasscap {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// A labeled corpus of vectorized greyscale images. Columns of `images` are
// the samples; labels are contiguous 0..num_classes-1 in lexicographic order
// of the class directory names.
struct LabeledImageSet {
  Matrix images;  // n x total_samples
  std::vector<Index> labels;
  Index n = 0;
  Index num_classes = 0;
  std::vector<Index> class_counts;
  std::vector<std::string> class_names;

  Index total_samples() const { return images.cols(); }
  // Column indices carrying the given label, in stored order.
  std::vector<Index> indices_of(Index label) const;
};

// Rank-k model of one class, fit to the uncentered second moment. The
// directions stay orthonormal; the singular-value energy lives in `scales`
// so that scaled_basis() * scaled_basis()^T approximates E[x x^T].
struct EstimatedClassModel {
  Matrix directions;  // n x k_model, orthonormal columns
  Vector scales;      // s_j / sqrt(sample count)
  Index k_model = 0;
  Vector mean;        // size 0 unless fit in affine-means mode

  Matrix scaled_basis() const { return directions * scales.asDiagonal(); }
};

// Directory tree with one subdirectory per class, each holding P5 PGM files.
// Pixels are scaled to [0, 1]; all images must share one size.
LabeledImageSet load_image_dir(const std::filesystem::path& dir);

// Per-class half/half split (odd counts send the extra sample to train),
// deterministic in the seed. Every class needs >= 2 samples.
std::pair<LabeledImageSet, LabeledImageSet> split_train_test(
    const LabeledImageSet& set, std::uint64_t seed);

// Top-k_model left singular directions of the stacked training columns,
// energy-scaled. k_model must not exceed min(n, sample count).
EstimatedClassModel estimate_subspace(const Matrix& train_columns,
                                      Index k_model);

// Mean over test images of |residual|^2 / M after projecting Phi x onto the
// span of Phi * (its class's directions).
double estimate_noise_power(const LabeledImageSet& test,
                            const std::vector<EstimatedClassModel>& models,
                            const FeatureMatrix& phi);

struct FaceExperimentConfig {
  std::vector<Index> m_grid;
  std::vector<Index> l_grid;
  Index k_model = 9;
  double tau = 0.2;        // "discriminable" error threshold
  bool affine_means = false;  // subtract and classify with per-class means
  std::uint64_t seed = 0;
};

struct FaceExperimentResult {
  std::vector<Index> m_grid;
  std::vector<Index> l_grid;
  CountMatrix errors;              // |m_grid| x |l_grid|
  CountMatrix trials;
  Matrix error_rate;
  std::vector<double> sigma2_hat;  // re-estimated at each M
  std::vector<Index> max_l_empirical;        // largest grid L with rate < tau
  std::vector<std::int64_t> predicted;       // predicted_classes at sigma2_hat(M)
  double tau = 0.2;
};

// The full pipeline: split, fit per-class subspaces, then for every M draw a
// fresh feature matrix, estimate the noise power, and classify the test
// images of the first L classes for every L in the grid.
FaceExperimentResult run_face_experiment(const LabeledImageSet& set,
                                         const FaceExperimentConfig& config);

struct SyntheticCorpusConfig {
  Index n = 1024;
  Index num_classes = 10;
  Index images_per_class = 40;
  Index k = 9;
  double sigma2 = 1e-3;  // 0 gives exactly rank-k classes
  std::uint64_t seed = 0;
};

// Images x = U h + sigma z from per-class random bases; exercises the
// pipeline without an external face database.
LabeledImageSet make_synthetic_corpus(const SyntheticCorpusConfig& config);

}  // namespace grasscap
