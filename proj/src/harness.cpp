#include "ttaad/harness.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

namespace ttaad {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGratingAmplitude = 0.3;
constexpr double kMinFrequency = 2.0;   // cycles per image
constexpr double kMaxFrequency = 5.0;
constexpr double kOutMinFrequency = 8.0;
constexpr double kOutMaxFrequency = 14.0;

struct Grating {
  double orientation = 0.0;  // radians
  double frequency = 0.0;    // cycles per image
  double phase = 0.0;
  double amplitude = kGratingAmplitude;
};

// Orientations start at 10 degrees so that no class is mirror-symmetric under hflip
// and no two classes are mirror images of each other.
Grating class_grating(const SyntheticSpec& spec, int c) {
  const double k = static_cast<double>(spec.n_classes);
  Grating g;
  g.orientation = (10.0 + 180.0 * c / k) * kPi / 180.0;
  g.frequency = spec.n_classes == 1 ? kMinFrequency
                                    : kMinFrequency + (kMaxFrequency - kMinFrequency) * c / (k - 1.0);
  g.phase = 0.4 + 1.3 * c;
  return g;
}

Plane<double> render(const Grating& g, Index h, Index w) {
  Plane<double> p(h, w);
  const double cx = std::cos(g.orientation) / static_cast<double>(w);
  const double cy = std::sin(g.orientation) / static_cast<double>(h);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      p(y, x) = 0.5 + g.amplitude * std::sin(2.0 * kPi * g.frequency * (x * cx + y * cy) + g.phase);
    }
  }
  return p;
}

void add_noise(Plane<double>& p, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (Index i = 0; i < p.size(); ++i) p.data()[i] += noise(rng);
}

LabeledImage in_sample(const SyntheticSpec& spec, int c, std::mt19937_64& rng) {
  Grating g = class_grating(spec, c);
  std::uniform_real_distribution<double> amp(0.8, 1.2);
  std::normal_distribution<double> jitter(0.0, 0.2);
  g.amplitude *= amp(rng);
  g.phase += jitter(rng);
  Plane<double> p = render(g, spec.height, spec.width);
  add_noise(p, spec.noise_sigma, rng);
  return {Image(clamp_unit(p)), c};
}

LabeledImage out_sample(const SyntheticSpec& spec, std::mt19937_64& rng) {
  const double k = static_cast<double>(spec.n_classes);
  std::uniform_int_distribution<int> held_out(0, spec.n_classes - 1);
  std::uniform_real_distribution<double> freq(kOutMinFrequency, kOutMaxFrequency);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Grating g;
  g.orientation = (10.0 + 180.0 * (held_out(rng) + 0.5) / k) * kPi / 180.0;
  g.frequency = freq(rng);
  g.phase = 2.0 * kPi * unit(rng);
  Plane<double> p = render(g, spec.height, spec.width);

  // Structured component: one Gaussian blob of random sign, position and width.
  const double amp = 0.5 * (unit(rng) - 0.5);
  const double by = unit(rng) * static_cast<double>(spec.height);
  const double bx = unit(rng) * static_cast<double>(spec.width);
  const double s = 3.0 + 3.0 * unit(rng);
  for (Index y = 0; y < spec.height; ++y) {
    for (Index x = 0; x < spec.width; ++x) {
      const double d2 = (y - by) * (y - by) + (x - bx) * (x - bx);
      p(y, x) += amp * std::exp(-d2 / (2.0 * s * s));
    }
  }
  add_noise(p, spec.noise_sigma, rng);
  return {Image(clamp_unit(p)), -1};
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Index i = 0; i < p.rows(); ++i) {
    p.row(i) = (p.row(i).array() - p.row(i).maxCoeff()).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

Eigen::MatrixXd all_logits(const LinearClassifier& clf, const Eigen::MatrixXd& inputs) {
  return (inputs * clf.weights.transpose()).rowwise() + clf.biases.transpose();
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_classes < 2) throw InputError("need at least 2 classes");
  if (height < 8 || width < 8) throw InputError("synthetic images must be at least 8x8");
  if (n_train_per_class < 1 || n_test_in < 1 || n_test_out < 1) throw InputError("sample counts must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InputError("noise sigma must be >= 0");
}

Image class_prototype(const SyntheticSpec& spec, int class_id) {
  return Image(clamp_unit(render(class_grating(spec, class_id), spec.height, spec.width)));
}

Dataset generate_dataset(const SyntheticSpec& spec) {
  spec.validate();

  // Class means must be well separated for the classifier to have anything to learn.
  const double min_gap = 0.1 * std::sqrt(static_cast<double>(spec.height * spec.width));
  for (int a = 0; a < spec.n_classes; ++a) {
    for (int b = a + 1; b < spec.n_classes; ++b) {
      const double gap = (class_prototype(spec, a).plane(0) - class_prototype(spec, b).plane(0)).norm();
      if (gap <= min_gap) {
        throw InputError("classes " + std::to_string(a) + " and " + std::to_string(b) +
                         " are too close for this image size");
      }
    }
  }

  std::mt19937_64 rng(spec.seed);
  Dataset data;
  data.train.reserve(static_cast<std::size_t>(spec.n_classes * spec.n_train_per_class));
  for (int i = 0; i < spec.n_train_per_class; ++i) {
    for (int c = 0; c < spec.n_classes; ++c) data.train.push_back(in_sample(spec, c, rng));
  }
  for (int i = 0; i < spec.n_test_in; ++i) data.test_in.push_back(in_sample(spec, i % spec.n_classes, rng));
  for (int i = 0; i < spec.n_test_out; ++i) data.test_out.push_back(out_sample(spec, rng));
  return data;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd design_matrix(const std::vector<LabeledImage>& samples) {
  if (samples.empty()) return {};
  const Index d = samples.front().image.height() * samples.front().image.width() * samples.front().image.channels();
  Eigen::MatrixXd x(static_cast<Index>(samples.size()), d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto row = samples[i].image.flattened();
    if (row.size() != d) throw InputError("training images differ in size");
    x.row(static_cast<Index>(i)) = row.transpose();
  }
  return x;
}

double cross_entropy_loss(const LinearClassifier& clf, const Eigen::MatrixXd& inputs, const std::vector<int>& labels) {
  const Eigen::MatrixXd z = all_logits(clf, inputs);
  double loss = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    loss += lse - z(i, labels[static_cast<std::size_t>(i)]);
  }
  return loss / static_cast<double>(z.rows());
}

Gradient cross_entropy_gradient(const LinearClassifier& clf, const Eigen::MatrixXd& inputs,
                                const std::vector<int>& labels) {
  Eigen::MatrixXd residual = softmax_rows(all_logits(clf, inputs));
  for (Index i = 0; i < residual.rows(); ++i) residual(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
  const double n = static_cast<double>(inputs.rows());
  return {residual.transpose() * inputs / n, residual.colwise().sum().transpose() / n};
}

TrainResult train_classifier(const std::vector<LabeledImage>& train, const TrainOptions& options) {
  if (train.empty()) throw InputError("training set is empty");
  if (options.epochs < 0) throw InputError("epochs must be >= 0");
  if (!(options.learning_rate > 0.0)) throw InputError("learning rate must be positive");

  int n_classes = 0;
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& s : train) {
    if (s.class_id < 0) throw InputError("training samples need a class id");
    labels.push_back(s.class_id);
    n_classes = std::max(n_classes, s.class_id + 1);
  }
  std::vector<int> per_class(static_cast<std::size_t>(n_classes), 0);
  for (int l : labels) ++per_class[static_cast<std::size_t>(l)];
  for (int c = 0; c < n_classes; ++c) {
    if (per_class[static_cast<std::size_t>(c)] == 0) throw InputError("class " + std::to_string(c) + " has no samples");
  }

  const Eigen::MatrixXd x = design_matrix(train);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  LinearClassifier clf;
  clf.weights = Eigen::MatrixXd::NullaryExpr(n_classes, x.cols(), [&]() { return init(rng); });
  clf.biases = Eigen::VectorXd::Zero(n_classes);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const Gradient grad = cross_entropy_gradient(clf, x, labels);
    clf.weights -= options.learning_rate * grad.weights;
    clf.biases -= options.learning_rate * grad.biases;
    if (!clf.weights.allFinite() || !clf.biases.allFinite()) {
      throw NumericalError("training diverged at epoch " + std::to_string(epoch + 1));
    }
  }

  TrainResult result;
  result.final_loss = cross_entropy_loss(clf, x, labels);
  if (!std::isfinite(result.final_loss)) {
    throw NumericalError("training diverged at epoch " + std::to_string(options.epochs));
  }
  const Eigen::MatrixXd z = all_logits(clf, x);
  std::size_t correct = 0;
  for (Index i = 0; i < z.rows(); ++i) correct += argmax(z.row(i).transpose()) == labels[static_cast<std::size_t>(i)];
  result.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
  result.classifier = std::move(clf);
  return result;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Scorer scorer) {
  switch (scorer) {
    case Scorer::Anomaly: return "anomaly";
    case Scorer::Remaining: return "remaining";
    case Scorer::Msp: return "msp";
  }
  return "anomaly";
}

std::vector<TtaadRecord> run_ttaad(const LinearClassifier& clf, const std::vector<LabeledImage>& test_in,
                                   const std::vector<LabeledImage>& test_out, const Augmentation& transform,
                                   Temperature t, unsigned threads) {
  const std::size_t n_in = test_in.size();
  const std::size_t total = n_in + test_out.size();
  std::vector<TtaadRecord> records(total);

  auto score_one = [&](std::size_t i) {
    const bool inside = i < n_in;
    const auto& sample = inside ? test_in[i] : test_out[i - n_in];
    auto& rec = records[i];
    const std::size_t number = inside ? i : i - n_in;
    rec.id = (inside ? "in-" : "out-") + std::to_string(number);
    rec.label = inside ? Label::In : Label::Out;
    rec.raw_logits = clf.logits(sample.image);
    rec.aug_logits = clf.logits(transform.apply(sample.image));
    rec.scores = score_pipeline(rec.raw_logits, rec.aug_logits, t);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || total < 2) {
    for (std::size_t i = 0; i < total; ++i) score_one(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
          try {
            for (std::size_t i = w; i < total; i += threads) score_one(i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return records;
}

std::vector<ScoreRecord> records_for(const std::vector<TtaadRecord>& records, Scorer scorer) {
  std::vector<ScoreRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const double s = scorer == Scorer::Anomaly     ? r.scores.anomaly
                     : scorer == Scorer::Remaining ? r.scores.remaining
                                                   : r.scores.msp;
    out.push_back({s, r.label, r.id});
  }
  return out;
}

}  // namespace ttaad
