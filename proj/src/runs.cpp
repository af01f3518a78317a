#include "ttaad/runs.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>
#include <utility>

namespace ttaad {

namespace {

constexpr double kPdfNormalizationTolerance = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ trial));
}

// n1 n2 f g / (n1 f + n2 g) written as a harmonic mean, which stays finite when
// one density is infinite at an endpoint and is 0 wherever either density is.
double runs_integrand(double f, double g, double n1, double n2) {
  if (!(f > 0.0) || !(g > 0.0)) return 0.0;
  return 1.0 / (1.0 / (n1 * f) + 1.0 / (n2 * g));
}

std::size_t count_runs_of_labels(std::vector<std::pair<double, std::uint8_t>>& draws) {
  // IN (1) before OUT (0) among equal values, matching scores_to_sequence.
  std::sort(draws.begin(), draws.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  std::size_t runs = 1;
  for (std::size_t i = 1; i < draws.size(); ++i) runs += draws[i].second != draws[i - 1].second;
  return runs;
}

std::vector<double> split_numbers(std::string_view text, const std::string& what) {
  std::vector<double> out;
  for (auto cell : split_csv_line(text)) out.push_back(parse_real(cell, what));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

BinarySequence parse_bits(std::string_view bits) {
  BinarySequence seq;
  seq.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("bit string may only contain 0 and 1");
    seq.push_back(c == '1' ? kInBit : kOutBit);
  }
  return seq;
}

std::size_t count_runs(std::span<const std::uint8_t> seq) {
  if (seq.empty()) throw InputError("runs are undefined for an empty sequence");
  std::size_t runs = 1;
  for (std::size_t i = 1; i < seq.size(); ++i) runs += seq[i] != seq[i - 1];
  return runs;
}

BinarySequence scores_to_sequence(const std::vector<ScoreRecord>& records) {
  if (records.empty()) throw InputError("cannot build a sequence from no records");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].score != records[b].score) return records[a].score < records[b].score;
    return records[a].label == Label::In && records[b].label == Label::Out;
  });
  BinarySequence seq;
  seq.reserve(records.size());
  for (std::size_t i : order) seq.push_back(records[i].label == Label::In ? kInBit : kOutBit);
  return seq;
}

// ---------------------------------------------------------------------------

PdfOnUnit::PdfOnUnit(std::string descriptor, Density density, Sampler sampler)
    : descriptor_(std::move(descriptor)), density_(std::move(density)), sampler_(std::move(sampler)) {
  const auto mass = integrate(density_, 0.0, 1.0, {1e-9, 20000});
  if (std::abs(mass.value - 1.0) > kPdfNormalizationTolerance) {
    throw InputError(descriptor_ + " does not integrate to 1 on [0,1] (got " + format_short(mass.value) + ")");
  }
}

PdfOnUnit PdfOnUnit::uniform() {
  PdfOnUnit pdf("uniform", [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; },
                [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); });
  pdf.beta_ = BetaParams(1.0, 1.0);
  return pdf;
}

PdfOnUnit PdfOnUnit::uniform_on(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) throw InputError("uniform support must satisfy 0 <= lo < hi <= 1");
  const double height = 1.0 / (hi - lo);
  return PdfOnUnit(
      "uniform:" + format_short(lo) + "," + format_short(hi),
      [=](double x) { return x >= lo && x <= hi ? height : 0.0; },
      [=](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); });
}

PdfOnUnit PdfOnUnit::beta(const BetaParams& p) {
  PdfOnUnit pdf("beta:" + format_short(p.alpha()) + "," + format_short(p.beta()),
                [p](double x) { return beta_pdf(x, p); }, [p](std::mt19937_64& rng) { return sample_beta(p, rng); });
  pdf.beta_ = p;
  return pdf;
}

PdfOnUnit PdfOnUnit::parse(std::string_view text) {
  if (text == "uniform") return uniform();
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const auto kind = text.substr(0, colon);
    const auto args = split_numbers(text.substr(colon + 1), "distribution '" + std::string(text) + "'");
    if (args.size() == 2 && kind == "uniform") return uniform_on(args[0], args[1]);
    if (args.size() == 2 && kind == "beta") return beta(BetaParams(args[0], args[1]));
  }
  throw InputError("unknown distribution '" + std::string(text) + "' (use uniform, uniform:lo,hi or beta:a,b)");
}

SampleSizes::SampleSizes(long n1, long n2) {
  if (n1 < 1 || n2 < 1) throw InputError("sample sizes must be at least 1");
  n1_ = static_cast<std::size_t>(n1);
  n2_ = static_cast<std::size_t>(n2);
}

// ---------------------------------------------------------------------------

McEstimate expected_runs_mc(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n, std::size_t trials,
                            std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw InputError("Monte Carlo needs at least one trial");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));

  std::vector<std::uint32_t> runs(trials);
  auto work = [&](unsigned worker) {
    std::vector<std::pair<double, std::uint8_t>> draws;
    draws.reserve(n.n1() + n.n2());
    for (std::size_t t = worker; t < trials; t += threads) {
      auto rng = trial_generator(seed, t);
      draws.clear();
      for (std::size_t i = 0; i < n.n1(); ++i) draws.emplace_back(f.sample(rng), kInBit);
      for (std::size_t i = 0; i < n.n2(); ++i) draws.emplace_back(g.sample(rng), kOutBit);
      runs[t] = static_cast<std::uint32_t>(count_runs_of_labels(draws));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  // Summed in trial order, so the result is independent of the worker count.
  const double count = static_cast<double>(trials);
  double sum = 0.0;
  for (auto r : runs) sum += r;
  const double mean = sum / count;
  double ss = 0.0;
  for (auto r : runs) ss += (r - mean) * (r - mean);
  const double sd = trials > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(count), trials};
}

QuadratureResult expected_runs_integral(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n,
                                        const QuadratureOptions& options) {
  const double n1 = static_cast<double>(n.n1());
  const double n2 = static_cast<double>(n.n2());
  return integrate([&](double x) { return runs_integrand(f(x), g(x), n1, n2); }, 0.0, 1.0, options);
}

double expected_runs_quadrature(const PdfOnUnit& f, const PdfOnUnit& g, const SampleSizes& n, double abs_tol) {
  return expected_runs_integral(f, g, n, {abs_tol, 20000}).value;
}

double enumerated_expected_runs(std::size_t n1, std::size_t n2) {
  const std::size_t total = n1 + n2;
  if (n1 == 0 || n2 == 0) return 1.0;
  if (total > 30) throw InputError("enumeration limited to n1 + n2 <= 30");
  double sum = 0.0;
  double arrangements = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n1) continue;
    std::size_t runs = 1;
    for (std::size_t i = 1; i < total; ++i) runs += ((mask >> i) & 1U) != ((mask >> (i - 1)) & 1U);
    sum += static_cast<double>(runs);
    arrangements += 1.0;
  }
  return sum / arrangements;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Lemma3Regime regime) {
  switch (regime) {
    case Lemma3Regime::Negative: return "NEGATIVE_REGIME";
    case Lemma3Regime::Positive: return "POSITIVE_REGIME";
    case Lemma3Regime::Indeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

double positive_regime_threshold(const BetaParams& p1) {
  const auto upper = static_cast<long>(std::floor(p1.beta()));
  double sum = 0.0;
  for (long k = 0; k <= upper; ++k) sum += 1.0 / (p1.alpha() + static_cast<double>(k));
  return sum;
}

Lemma3Regime lemma3_condition(const BetaParams& p1, const BetaParams& p2) {
  const double gap = p2.alpha() - p1.alpha();
  if (gap <= 0.0) return Lemma3Regime::Negative;
  if (gap >= positive_regime_threshold(p1)) return Lemma3Regime::Positive;
  return Lemma3Regime::Indeterminate;
}

BetaParameter parse_beta_parameter(std::string_view text) {
  if (text == "alpha1") return BetaParameter::Alpha1;
  if (text == "beta1") return BetaParameter::Beta1;
  if (text == "alpha2") return BetaParameter::Alpha2;
  if (text == "beta2") return BetaParameter::Beta2;
  throw InputError("unknown parameter '" + std::string(text) + "' (use alpha1, beta1, alpha2 or beta2)");
}

std::string_view to_string(BetaParameter which) {
  switch (which) {
    case BetaParameter::Alpha1: return "alpha1";
    case BetaParameter::Beta1: return "beta1";
    case BetaParameter::Alpha2: return "alpha2";
    case BetaParameter::Beta2: return "beta2";
  }
  return "alpha1";
}

double expected_runs_beta(const BetaParams& p1, const BetaParams& p2, const SampleSizes& n, double abs_tol) {
  const double n1 = static_cast<double>(n.n1());
  const double n2 = static_cast<double>(n.n2());
  auto integrand = [&](double x) { return runs_integrand(beta_pdf(x, p1), beta_pdf(x, p2), n1, n2); };
  return integrate(integrand, 0.0, 1.0, {abs_tol, 20000}).value;
}

double expected_runs_derivative(const BetaParams& p1, const BetaParams& p2, const SampleSizes& n,
                                BetaParameter which, double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  constexpr double kTol = 1e-10;
  std::array<double, 4> params = {p1.alpha(), p1.beta(), p2.alpha(), p2.beta()};
  const auto idx = static_cast<std::size_t>(which);
  if (params[idx] - h <= 0.0) throw InputError("finite-difference step leaves the parameter domain");

  auto eval = [&](double delta) {
    auto q = params;
    q[idx] += delta;
    return expected_runs_beta(BetaParams(q[0], q[1]), BetaParams(q[2], q[3]), n, kTol);
  };
  return (eval(h) - eval(-h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------

MaximalityReport maximality_sweep(const BetaParams& g, const std::vector<BetaParams>& candidates,
                                  const SampleSizes& n) {
  if (candidates.empty()) throw InputError("maximality sweep needs at least one candidate");
  MaximalityReport report{g, expected_runs_beta(g, g, n), {}, true, std::nullopt};
  for (const auto& c : candidates) {
    const double er = c == g ? report.reference_runs : expected_runs_beta(c, g, n);
    report.rows.push_back({c, er});
    if (er > report.reference_runs) report.holds = false;
    if (!(c == g)) {
      const double margin = report.reference_runs - er;
      report.min_margin = report.min_margin ? std::min(*report.min_margin, margin) : margin;
    }
  }
  return report;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  out << "alpha1,beta1,alpha2,beta2,n1,n2,er_quadrature,er_mc_mean,er_mc_stderr,regime\n";
  for (const auto& r : rows) {
    out << (r.p1 ? format_real(r.p1->alpha()) : "") << ',' << (r.p1 ? format_real(r.p1->beta()) : "") << ','
        << (r.p2 ? format_real(r.p2->alpha()) : "") << ',' << (r.p2 ? format_real(r.p2->beta()) : "") << ','
        << r.n1 << ',' << r.n2 << ',' << opt(r.er_quadrature) << ','
        << (r.er_mc ? format_real(r.er_mc->mean) : "") << ',' << (r.er_mc ? format_real(r.er_mc->std_error) : "")
        << ',' << (r.regime ? std::string(to_string(*r.regime)) : "") << '\n';
  }
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace ttaad
