#ifndef TTAAD_BETA_HPP
#define TTAAD_BETA_HPP

#include <random>
#include <span>
#include <string>

namespace ttaad {

/// Shape parameters of a Beta distribution on [0,1]; both strictly positive and finite.
class BetaParams {
 public:
  BetaParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mean() const { return alpha_ / (alpha_ + beta_); }
  double variance() const;

  std::string describe() const;

  friend bool operator==(const BetaParams&, const BetaParams&) = default;

 private:
  double alpha_;
  double beta_;
};

/// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b).
double log_beta_function(double a, double b);

/// x^(a-1) (1-x)^(b-1) / B(a, b). Endpoints take their limits (possibly +inf).
double beta_pdf(double x, const BetaParams& p);

/// Digamma psi(z) = Gamma'(z)/Gamma(z) for z > 0: upward recurrence to z >= 6,
/// then the asymptotic series.
double digamma(double z);

/// Method-of-moments fit from a mean and a variance: c = m(1-m)/v - 1,
/// alpha = m c, beta = (1-m) c. Requires 0 < m < 1 and 0 < v < m(1-m).
BetaParams beta_from_moments(double mean, double variance);

/// Method-of-moments fit using the sample mean and the unbiased sample variance.
/// Needs >= 2 samples, all strictly inside (0,1).
BetaParams beta_fit(std::span<const double> samples);

/// One draw via two Gamma variates: X / (X + Y), X ~ Gamma(alpha), Y ~ Gamma(beta).
double sample_beta(const BetaParams& p, std::mt19937_64& rng);

}  // namespace ttaad

#endif  // TTAAD_BETA_HPP
