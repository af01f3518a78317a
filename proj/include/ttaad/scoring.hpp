#ifndef TTAAD_SCORING_HPP
#define TTAAD_SCORING_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ttaad/error.hpp"

namespace ttaad {

/// Softmax temperature; must be positive and finite.
class Temperature {
 public:
  static constexpr double kDefault = 5.0;

  explicit Temperature(double t = kDefault) : t_(t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("temperature must be positive and finite");
  }
  double value() const { return t_; }

 private:
  double t_;
};

namespace detail {

template <class A, class B>
void require_same_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) {
    throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

}  // namespace detail

/// Index of the largest entry; ties go to the lowest index.
template <class Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

/// Temperature-scaled softmax exp(z/t - max) / sum, stabilized by the max.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax_t(const Eigen::MatrixBase<Derived>& logits,
                                                                     Temperature t) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (logits.size() < 2) throw InputError("softmax needs at least 2 logits");
  const Vector scaled = logits.derived().template cast<Scalar>() / static_cast<Scalar>(t.value());
  const Vector e = (scaled.array() - scaled.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// S = 1 - <p, q>; 0 for a perfectly consistent prediction, 1 for a maximally inconsistent one.
template <class A, class B>
typename A::Scalar anomaly_score(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  using Scalar = typename A::Scalar;
  detail::require_same_length(p, q);
  return std::clamp(Scalar(1) - p.dot(q), Scalar(0), Scalar(1));
}

/// Inner-product mass contributed by every class except argmax(p).
template <class A, class B>
typename A::Scalar remaining_score(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  using Scalar = typename A::Scalar;
  detail::require_same_length(p, q);
  const Eigen::Index j = argmax(p);
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i != j) sum += p[i] * q[i];
  }
  return sum;
}

/// 1 - max(p), so that larger means more anomalous like the other scores.
template <class Derived>
typename Derived::Scalar msp_score(const Eigen::MatrixBase<Derived>& p) {
  return typename Derived::Scalar(1) - p.maxCoeff();
}

/// Consistency score for unsupervised feature outputs: both vectors are
/// L2-normalized first so the result stays in [0,1] for non-negative features.
template <class A, class B>
typename A::Scalar feature_anomaly_score(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  detail::require_same_length(a, b);
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) throw InputError("feature vector has zero norm");
  return std::clamp(Scalar(1) - a.dot(b) / (na * nb), Scalar(0), Scalar(1));
}

struct SampleScores {
  double anomaly = 0.0;
  double remaining = 0.0;
  double msp = 0.0;
  /// max of the raw-input probabilities; the slice coordinate.
  double pmax = 0.0;
};

/// Scores from a pair of already-computed probability vectors.
template <class A, class B>
SampleScores score_probabilities(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  detail::require_same_length(p, q);
  return {anomaly_score(p, q), remaining_score(p, q), msp_score(p), static_cast<double>(p.maxCoeff())};
}

/// One sample of the test-time pipeline: softmax_t on the raw and augmented
/// logits, then the three scorers.
template <class A, class B>
SampleScores score_pipeline(const Eigen::MatrixBase<A>& raw_logits, const Eigen::MatrixBase<B>& aug_logits,
                            Temperature t) {
  detail::require_same_length(raw_logits, aug_logits);
  return score_probabilities(softmax_t(raw_logits, t), softmax_t(aug_logits, t));
}

}  // namespace ttaad

#endif  // TTAAD_SCORING_HPP
