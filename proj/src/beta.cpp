#include "ttaad/beta.hpp"

#include <cmath>
#include <limits>

#include "ttaad/data_io.hpp"
#include "ttaad/error.hpp"

namespace ttaad {

BetaParams::BetaParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InputError("Beta parameters must be positive and finite (got " + format_short(alpha) + ", " +
                     format_short(beta) + ")");
  }
}

double BetaParams::variance() const {
  const double s = alpha_ + beta_;
  return alpha_ * beta_ / (s * s * (s + 1.0));
}

std::string BetaParams::describe() const { return "Beta(" + format_short(alpha_) + "," + format_short(beta_) + ")"; }

double log_beta_function(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double beta_pdf(double x, const BetaParams& p) {
  const double a = p.alpha();
  const double b = p.beta();
  if (x < 0.0 || x > 1.0) return 0.0;
  const double log_norm = log_beta_function(a, b);
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? std::exp(-log_norm) : 0.0;
  }
  if (x == 1.0) {
    if (b < 1.0) return std::numeric_limits<double>::infinity();
    return b == 1.0 ? std::exp(-log_norm) : 0.0;
  }
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_norm);
}

double digamma(double z) {
  if (!(z > 0.0)) throw InputError("digamma is only defined here for z > 0");
  double shift = 0.0;
  while (z < 6.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  // ln z - 1/(2z) - sum B_2k / (2k z^2k), Bernoulli terms through z^-12.
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
  return shift + std::log(z) - 0.5 * inv - series;
}

BetaParams beta_from_moments(double mean, double variance) {
  if (!(mean > 0.0 && mean < 1.0)) throw InputError("Beta fit infeasible: mean must lie in (0,1)");
  if (!(variance > 0.0)) throw InputError("Beta fit infeasible: degenerate (zero) variance");
  const double bound = mean * (1.0 - mean);
  if (!(variance < bound)) {
    throw InputError("Beta fit infeasible: variance " + format_short(variance) + " >= m(1-m) = " + format_short(bound));
  }
  const double c = bound / variance - 1.0;
  return {mean * c, (1.0 - mean) * c};
}

BetaParams beta_fit(std::span<const double> samples) {
  if (samples.size() < 2) throw InputError("Beta fit needs at least 2 samples");
  double sum = 0.0;
  for (double x : samples) {
    if (!(x > 0.0 && x < 1.0)) throw InputError("Beta fit samples must lie strictly inside (0,1)");
    sum += x;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return beta_from_moments(mean, ss / (n - 1.0));
}

double sample_beta(const BetaParams& p, std::mt19937_64& rng) {
  std::gamma_distribution<double> gx(p.alpha(), 1.0);
  std::gamma_distribution<double> gy(p.beta(), 1.0);
  const double x = gx(rng);
  const double y = gy(rng);
  // Both draws underflowing only happens for tiny shapes; fall back to the mean.
  if (x + y == 0.0) return p.mean();
  return x / (x + y);
}

}  // namespace ttaad
