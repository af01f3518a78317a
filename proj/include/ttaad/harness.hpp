#ifndef TTAAD_HARNESS_HPP
#define TTAAD_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttaad/data_io.hpp"
#include "ttaad/image.hpp"
#include "ttaad/scoring.hpp"
#include "ttaad/transforms.hpp"

namespace ttaad {

/// Parameters of the synthetic grating dataset.
struct SyntheticSpec {
  int n_classes = 4;
  Index height = 32;
  Index width = 32;
  int n_train_per_class = 200;
  int n_test_in = 200;
  int n_test_out = 200;
  double noise_sigma = 0.1;
  std::uint64_t seed = 7;

  void validate() const;
};

struct LabeledImage {
  Image image;
  int class_id = -1;  // -1 for out-distribution samples
};

struct Dataset {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> test_in;
  std::vector<LabeledImage> test_out;
};

/// Noise-free grating of in-distribution class `class_id`.
Image class_prototype(const SyntheticSpec& spec, int class_id);

/// In-distribution class c: oriented sinusoidal grating with a class-specific
/// orientation, spatial frequency and phase, plus Gaussian pixel noise.
/// Out-distribution: gratings at held-out orientations and higher frequencies
/// plus a random smooth blob. All pixels are clamped to [0,1]. Deterministic in spec.seed.
Dataset generate_dataset(const SyntheticSpec& spec);

/// Multinomial logistic regression on flattened pixels.
struct LinearClassifier {
  Eigen::MatrixXd weights;  // K x D
  Eigen::VectorXd biases;   // K

  Index n_classes() const { return weights.rows(); }
  Index input_size() const { return weights.cols(); }

  template <class Derived>
  Eigen::VectorXd logits(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != input_size()) {
      throw InputError("classifier expects " + std::to_string(input_size()) + " inputs, got " +
                       std::to_string(x.size()));
    }
    return weights * x + biases;
  }

  Eigen::VectorXd logits(const Image& image) const { return logits(image.flattened()); }
  int predict(const Image& image) const { return static_cast<int>(argmax(logits(image))); }
};

struct Gradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

/// Mean cross-entropy of rows of `inputs` (N x D) against integer labels.
double cross_entropy_loss(const LinearClassifier& clf, const Eigen::MatrixXd& inputs, const std::vector<int>& labels);
Gradient cross_entropy_gradient(const LinearClassifier& clf, const Eigen::MatrixXd& inputs,
                                const std::vector<int>& labels);

struct TrainOptions {
  int epochs = 300;
  double learning_rate = 0.5;
  std::uint64_t seed = 7;
};

struct TrainResult {
  LinearClassifier classifier;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

/// Full-batch gradient descent from a small seeded random initialization.
/// Throws NumericalError naming the epoch if the loss stops being finite.
TrainResult train_classifier(const std::vector<LabeledImage>& train, const TrainOptions& options);

/// Stacks flattened images as rows.
Eigen::MatrixXd design_matrix(const std::vector<LabeledImage>& samples);

enum class Scorer { Anomaly, Remaining, Msp };
std::string_view to_string(Scorer scorer);

/// Per-sample output of the test-time pipeline.
struct TtaadRecord {
  std::string id;
  Label label = Label::In;
  SampleScores scores;
  Eigen::VectorXd raw_logits;
  Eigen::VectorXd aug_logits;
};

/// For each test sample x: logits of x and T(x), then score_pipeline at
/// temperature t. Output order is test_in then test_out, regardless of `threads`.
std::vector<TtaadRecord> run_ttaad(const LinearClassifier& clf, const std::vector<LabeledImage>& test_in,
                                   const std::vector<LabeledImage>& test_out, const Augmentation& transform,
                                   Temperature t, unsigned threads = 1);

/// Projects pipeline output onto one scorer.
std::vector<ScoreRecord> records_for(const std::vector<TtaadRecord>& records, Scorer scorer);

}  // namespace ttaad

#endif  // TTAAD_HARNESS_HPP
