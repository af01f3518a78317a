#ifndef TTAAD_RUNS_HPP
#define TTAAD_RUNS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ttaad/beta.hpp"
#include "ttaad/data_io.hpp"
#include "ttaad/quadrature.hpp"

namespace ttaad {

// ---------------------------------------------------------------------------
// Runs counting

/// Sorted-label sequence: 0 = OUT, 1 = IN.
using BinarySequence = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kOutBit = 0;
inline constexpr std::uint8_t kInBit = 1;

/// Parses a string of '0'/'1' characters.
BinarySequence parse_bits(std::string_view bits);

/// Number of maximal blocks of equal adjacent symbols: 1 + #{i : s[i] != s[i+1]}.
std::size_t count_runs(std::span<const std::uint8_t> seq);

/// Labels ordered by ascending score. Among equal scores IN comes before OUT,
/// then input order.
BinarySequence scores_to_sequence(const std::vector<ScoreRecord>& records);

// ---------------------------------------------------------------------------
// Densities on [0,1]

/// A probability density supported on [0,1] with a matching sampler.
/// Construction checks by quadrature that the density integrates to 1 within 1e-6.
class PdfOnUnit {
 public:
  using Density = std::function<double(double)>;
  using Sampler = std::function<double(std::mt19937_64&)>;

  PdfOnUnit(std::string descriptor, Density density, Sampler sampler);

  static PdfOnUnit uniform();
  /// Uniform on [lo, hi] inside [0,1].
  static PdfOnUnit uniform_on(double lo, double hi);
  static PdfOnUnit beta(const BetaParams& p);

  /// "uniform", "uniform:lo,hi" or "beta:alpha,beta".
  static PdfOnUnit parse(std::string_view text);

  double operator()(double x) const { return density_(x); }
  double sample(std::mt19937_64& rng) const { return sampler_(rng); }
  const std::string& descriptor() const { return descriptor_; }
  /// Set when this density is a Beta (uniform counts as Beta(1,1)).
  const std::optional<BetaParams>& beta_params() const { return beta_; }

 private:
  std::string descriptor_;
  Density density_;
  Sampler sampler_;
  std::optional<BetaParams> beta_;
};

/// n1 samples from f (label IN), n2 from g (label OUT).
class SampleSizes {
 public:
  SampleSizes(long n1, long n2);
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  double kappa() const { return static_cast<double>(n1_) / static_cast<double>(n2_); }

 private:
  std::size_t n1_;
  std::size_t n2_;
};

// ---------------------------------------------------------------------------
// Expected runs

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo expected runs. Each trial draws n1 values from f and n2 from g,
/// sorts them and counts runs. Trial i uses its own generator seeded from
/// (seed, i), so results do not depend on `threads` (0 = hardware concurrency).
McEstimate expected_runs_mc(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n, std::size_t trials,
                            std::uint64_t seed, unsigned threads = 0);

/// Integral term of the expected-runs asymptotics:
///   integral over [0,1] of n1 n2 f g / (n1 f + n2 g),
/// with the integrand taken as 0 where n1 f + n2 g = 0.
QuadratureResult expected_runs_integral(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n,
                                        const QuadratureOptions& options = {});

double expected_runs_quadrature(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n,
                                double abs_tol = 1e-8);

/// Enumerates all C(n1+n2, n1) label arrangements (every one equally likely when
/// f = g) and returns their mean runs count. Exponential; intended for small n.
double enumerated_expected_runs(std::size_t n1, std::size_t n2);

// ---------------------------------------------------------------------------
// Derivative-sign conditions for Beta-modelled score distributions

enum class Lemma3Regime { Negative, Positive, Indeterminate };

std::string_view to_string(Lemma3Regime regime);

/// Sum_{k=0}^{floor(beta1)} 1 / (alpha1 + k).
double positive_regime_threshold(const BetaParams& p1);

/// NEGATIVE if alpha2 - alpha1 <= 0, POSITIVE if alpha2 - alpha1 >= threshold, else INDETERMINATE.
Lemma3Regime lemma3_condition(const BetaParams& p1, const BetaParams& p2);

enum class BetaParameter { Alpha1, Beta1, Alpha2, Beta2 };

BetaParameter parse_beta_parameter(std::string_view text);
std::string_view to_string(BetaParameter which);

/// Expected runs (integral term) with f = Beta(p1), g = Beta(p2).
double expected_runs_beta(const BetaParams& p1, const BetaParams& p2, const SampleSizes& n, double abs_tol = 1e-8);

/// Central finite difference of expected_runs_beta in one parameter, with the
/// quadrature tolerance tightened to 1e-10.
double expected_runs_derivative(const BetaParams& p1, const BetaParams& p2, const SampleSizes& n,
                                BetaParameter which, double h = 1e-4);

// ---------------------------------------------------------------------------
// Maximality at f = g

struct MaximalityRow {
  BetaParams params;
  double expected_runs = 0.0;
};

struct MaximalityReport {
  BetaParams reference;
  double reference_runs = 0.0;  // E R at f = g
  std::vector<MaximalityRow> rows;
  /// True when reference_runs >= every candidate's value.
  bool holds = false;
  /// Smallest reference_runs - candidate value over candidates different from g.
  std::optional<double> min_margin;
};

MaximalityReport maximality_sweep(const BetaParams& g, const std::vector<BetaParams>& candidates,
                                  const SampleSizes& n);

// ---------------------------------------------------------------------------
// Sweep report

/// One row of `alpha1,beta1,alpha2,beta2,n1,n2,er_quadrature,er_mc_mean,er_mc_stderr,regime`.
/// Absent values are written as empty cells.
struct SweepRow {
  std::optional<BetaParams> p1;
  std::optional<BetaParams> p2;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::optional<double> er_quadrature;
  std::optional<McEstimate> er_mc;
  std::optional<Lemma3Regime> regime;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace ttaad

#endif  // TTAAD_RUNS_HPP
