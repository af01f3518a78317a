#include "ttaad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace ttaad {

namespace {

struct ClassCounts {
  std::size_t in = 0;
  std::size_t out = 0;
};

ClassCounts count_labels(const std::vector<ScoreRecord>& records) {
  ClassCounts c;
  for (const auto& r : records) (r.label == Label::In ? c.in : c.out)++;
  return c;
}

ClassCounts require_both_classes(const std::vector<ScoreRecord>& records) {
  const auto c = count_labels(records);
  if (c.in == 0 || c.out == 0) {
    throw UndefinedMetricError("AUROC undefined: need at least one in and one out record (got " +
                               std::to_string(c.in) + " in, " + std::to_string(c.out) + " out)");
  }
  return c;
}

// Indices sorted by score ascending.
std::vector<std::size_t> order_by_score(const std::vector<ScoreRecord>& records) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].score < records[b].score; });
  return order;
}

LabelMoments moments(const std::vector<double>& values) {
  LabelMoments m;
  m.count = values.size();
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  m.mean = mean;
  m.variance = ss / n;
  return m;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

nlohmann::json moments_json(const LabelMoments& m) {
  nlohmann::json j;
  j["count"] = m.count;
  j["mean"] = m.mean ? nlohmann::json(*m.mean) : nlohmann::json(nullptr);
  j["var"] = m.variance ? nlohmann::json(*m.variance) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

double auroc(const std::vector<ScoreRecord>& records) {
  const auto counts = require_both_classes(records);
  const auto order = order_by_score(records);

  // Walk tie groups in ascending order. Each OUT in a group beats every IN seen
  // before the group and ties with the INs inside it. Half-integer sums are exact.
  double wins = 0.0;
  std::size_t in_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_in = 0;
    std::size_t group_out = 0;
    while (j < order.size() && records[order[j]].score == records[order[i]].score) {
      (records[order[j]].label == Label::In ? group_in : group_out)++;
      ++j;
    }
    wins += static_cast<double>(group_out) * static_cast<double>(in_below) +
            0.5 * static_cast<double>(group_out) * static_cast<double>(group_in);
    in_below += group_in;
    i = j;
  }
  return wins / (static_cast<double>(counts.in) * static_cast<double>(counts.out));
}

std::vector<RocPoint> roc_curve(const std::vector<ScoreRecord>& records) {
  const auto counts = require_both_classes(records);
  auto order = order_by_score(records);
  std::reverse(order.begin(), order.end());

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = records[order[i]].score;
    while (i < order.size() && records[order[i]].score == threshold) {
      (records[order[i]].label == Label::Out ? tp : fp)++;
      ++i;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(counts.in),
                     static_cast<double>(tp) / static_cast<double>(counts.out), threshold});
  }
  return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) * 0.5;
  }
  return area;
}

std::size_t unit_interval_index(double x, std::size_t n) {
  if (!(x > 0.0)) return 0;
  if (x >= 1.0) return n - 1;
  return std::min(static_cast<std::size_t>(x * static_cast<double>(n)), n - 1);
}

std::vector<SliceStats> slice_analysis(const std::vector<SliceSample>& samples, std::size_t n_slices) {
  if (n_slices == 0) throw InputError("slice count must be positive");
  std::vector<std::vector<double>> in_values(n_slices);
  std::vector<std::vector<double>> out_values(n_slices);
  for (const auto& s : samples) {
    if (!(s.pmax >= 0.0 && s.pmax <= 1.0)) throw InputError("max probability outside [0,1]");
    const std::size_t k = unit_interval_index(s.pmax, n_slices);
    (s.label == Label::In ? in_values : out_values)[k].push_back(s.remaining);
  }
  std::vector<SliceStats> slices(n_slices);
  const double width = 1.0 / static_cast<double>(n_slices);
  for (std::size_t k = 0; k < n_slices; ++k) {
    slices[k].lo = static_cast<double>(k) * width;
    slices[k].hi = k + 1 == n_slices ? 1.0 : static_cast<double>(k + 1) * width;
    slices[k].in = moments(in_values[k]);
    slices[k].out = moments(out_values[k]);
  }
  return slices;
}

Histogram histogram(const std::vector<ScoreRecord>& records, std::size_t n_bins) {
  if (n_bins == 0) throw InputError("bin count must be positive");
  Histogram h;
  h.n_bins = n_bins;
  h.in.assign(n_bins, 0);
  h.out.assign(n_bins, 0);
  for (const auto& r : records) {
    const bool clamped = r.score < 0.0 || r.score > 1.0;
    const std::size_t b = unit_interval_index(r.score, n_bins);
    if (r.label == Label::In) {
      ++h.in[b];
      h.clamped_in += clamped;
    } else {
      ++h.out[b];
      h.clamped_out += clamped;
    }
  }
  return h;
}

std::string summary_json(const EvaluationSummary& summary, int indent) {
  nlohmann::json j;
  j["auroc"] = summary.auroc;
  j["n_in"] = summary.n_in;
  j["n_out"] = summary.n_out;

  const auto& h = summary.histogram;
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t b = 0; b <= h.n_bins; ++b) edges.push_back(static_cast<double>(b) / static_cast<double>(h.n_bins));
  j["histogram"] = {{"bins", h.n_bins}, {"edges", edges}, {"in", h.in}, {"out", h.out},
                    {"clamped_in", h.clamped_in}, {"clamped_out", h.clamped_out}};

  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : summary.slices) {
    slices.push_back({{"lo", s.lo}, {"hi", s.hi}, {"in", moments_json(s.in)}, {"out", moments_json(s.out)}});
  }
  j["slices"] = slices;
  return j.dump(indent);
}

void write_roc_csv(const std::vector<RocPoint>& curve, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "fpr,tpr,threshold\n";
  for (const auto& p : curve) {
    out << format_real(p.fpr) << ',' << format_real(p.tpr) << ','
        << (std::isinf(p.threshold) ? std::string("inf") : format_real(p.threshold)) << '\n';
  }
}

void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "lo,hi,label,count\n";
  for (std::size_t b = 0; b < hist.n_bins; ++b) {
    out << format_real(hist.bin_lo(b)) << ',' << format_real(hist.bin_hi(b)) << ",in," << hist.in[b] << '\n';
    out << format_real(hist.bin_lo(b)) << ',' << format_real(hist.bin_hi(b)) << ",out," << hist.out[b] << '\n';
  }
}

void write_slices_csv(const std::vector<SliceStats>& slices, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "lo,hi,label,mean,var,count\n";
  auto row = [&](const SliceStats& s, const char* label, const LabelMoments& m) {
    out << format_real(s.lo) << ',' << format_real(s.hi) << ',' << label << ','
        << (m.mean ? format_real(*m.mean) : "") << ',' << (m.variance ? format_real(*m.variance) : "") << ','
        << m.count << '\n';
  };
  for (const auto& s : slices) {
    row(s, "in", s.in);
    row(s, "out", s.out);
  }
}

}  // namespace ttaad
