#ifndef TTAAD_EVALUATION_HPP
#define TTAAD_EVALUATION_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "ttaad/data_io.hpp"

namespace ttaad {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

/// Mann-Whitney AUROC with OUT as the positive class: the fraction of
/// (out, in) pairs where the OUT score is larger, ties counting one half.
/// Throws UndefinedMetricError unless both labels are present.
double auroc(const std::vector<ScoreRecord>& records);

/// One point per distinct score (threshold descending, "positive if score >=
/// threshold"), preceded by (0,0) at threshold +inf.
std::vector<RocPoint> roc_curve(const std::vector<ScoreRecord>& records);

/// Trapezoidal area under a ROC polyline.
double trapezoid_area(const std::vector<RocPoint>& curve);

struct LabelMoments {
  std::size_t count = 0;
  std::optional<double> mean;      // empty when count == 0
  std::optional<double> variance;  // population variance
};

/// Remaining-score statistics for one max-probability interval.
struct SliceStats {
  double lo = 0.0;
  double hi = 0.0;
  LabelMoments in;
  LabelMoments out;
};

struct SliceSample {
  Label label = Label::In;
  double pmax = 0.0;
  double remaining = 0.0;
};

/// Splits [0,1] into `n_slices` equal intervals [lo, hi) (the last one closed at 1)
/// by pmax, and reports mean / population variance of the remaining score per label.
std::vector<SliceStats> slice_analysis(const std::vector<SliceSample>& samples, std::size_t n_slices);

/// Equal-width bins over [0,1]. Out-of-range scores are clamped into the end
/// bins and counted in `clamped_*`.
struct Histogram {
  std::size_t n_bins = 0;
  std::vector<std::size_t> in;
  std::vector<std::size_t> out;
  std::size_t clamped_in = 0;
  std::size_t clamped_out = 0;

  double bin_lo(std::size_t b) const { return static_cast<double>(b) / static_cast<double>(n_bins); }
  double bin_hi(std::size_t b) const { return static_cast<double>(b + 1) / static_cast<double>(n_bins); }
};

Histogram histogram(const std::vector<ScoreRecord>& records, std::size_t n_bins);

/// Bin / slice index of x in [0,1] for n equal intervals; 1.0 lands in the last one.
std::size_t unit_interval_index(double x, std::size_t n);

// ---------------------------------------------------------------------------
// Exports

struct EvaluationSummary {
  double auroc = 0.0;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  Histogram histogram;
  std::vector<SliceStats> slices;
};

/// `{ "auroc", "n_in", "n_out", "histogram": {...}, "slices": [...] }`
std::string summary_json(const EvaluationSummary& summary, int indent = 2);

/// `fpr,tpr,threshold`
void write_roc_csv(const std::vector<RocPoint>& curve, const std::filesystem::path& path);
/// `lo,hi,label,count`
void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path);
/// `lo,hi,label,mean,var,count`; mean and var are empty cells for empty slices.
void write_slices_csv(const std::vector<SliceStats>& slices, const std::filesystem::path& path);

}  // namespace ttaad

#endif  // TTAAD_EVALUATION_HPP
