#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "ttaad/data_io.hpp"
#include "ttaad/error.hpp"
#include "ttaad/evaluation.hpp"
#include "ttaad/harness.hpp"
#include "ttaad/runs.hpp"
#include "ttaad/scoring.hpp"
#include "ttaad/transforms.hpp"

namespace ttaad::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void write_json(const json& doc, const fs::path& path) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

// nlohmann refuses non-finite doubles as numbers; keep them visible as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool json_format(const GlobalArgs& global) { return global.format == "json"; }

Augmentation make_augmentation(const std::string& kind, std::optional<double> radius) {
  if (kind == "fft") {
    if (!radius) throw InputError("--radius is required with --transform fft");
    return Augmentation::fft(*radius);
  }
  if (kind == "flip") {
    if (radius) throw InputError("--radius only applies to --transform fft");
    return Augmentation::flip();
  }
  throw InputError("unknown transform '" + kind + "' (expected fft or flip)");
}

SyntheticSpec synthetic_spec(const HarnessArgs& h, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_classes = h.classes;
  spec.height = h.size;
  spec.width = h.size;
  spec.n_train_per_class = h.n_train;
  spec.n_test_in = h.n_in;
  spec.n_test_out = h.n_out;
  spec.noise_sigma = h.noise;
  spec.seed = seed;
  spec.validate();
  return spec;
}

struct TrainedFixture {
  Dataset data;
  TrainResult trained;
};

TrainedFixture train_fixture(const HarnessArgs& h, std::uint64_t seed) {
  if (h.epochs < 0) throw InputError("--epochs must be non-negative");
  TrainedFixture fx;
  fx.data = generate_dataset(synthetic_spec(h, seed));
  TrainOptions opts;
  opts.epochs = h.epochs;
  opts.learning_rate = h.lr;
  opts.seed = seed;
  fx.trained = train_classifier(fx.data.train, opts);
  return fx;
}

void write_scores_csv(const std::vector<std::string>& ids, const std::vector<Label>& labels,
                      const std::vector<SampleScores>& scores, const fs::path& path) {
  auto out = open_output(path);
  out << "id,label,anomaly,remaining,msp\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << ids[i] << ',' << to_string(labels[i]) << ',' << format_real(scores[i].anomaly) << ','
        << format_real(scores[i].remaining) << ',' << format_real(scores[i].msp) << '\n';
  }
}

void write_scores_json(const std::vector<std::string>& ids, const std::vector<Label>& labels,
                       const std::vector<SampleScores>& scores, const fs::path& path) {
  json rows = json::array();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    rows.push_back({{"id", ids[i]},
                    {"label", to_string(labels[i])},
                    {"anomaly", scores[i].anomaly},
                    {"remaining", scores[i].remaining},
                    {"msp", scores[i].msp}});
  }
  write_json(rows, path);
}

std::vector<SliceSample> slice_samples_from_table(const ScoreTable& table) {
  std::vector<SliceSample> samples;
  if (!table.has("msp") || !table.has("remaining")) return samples;
  const auto& msp = table.columns.at("msp");
  const auto& rem = table.columns.at("remaining");
  samples.reserve(msp.size());
  for (std::size_t i = 0; i < msp.size(); ++i) samples.push_back({table.labels[i], 1.0 - msp[i], rem[i]});
  return samples;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_transform(const GlobalArgs& global, const TransformArgs& args) {
  const Augmentation aug = make_augmentation(args.transform, args.radius);
  Image image;
  int maxval = 255;
  if (fs::is_regular_file(args.input)) {
    PgmFile file = read_pgm(args.input);
    image = std::move(file.image);
    maxval = file.maxval;
  } else {
    image = read_image(args.input);
  }
  const fs::path out = global.out_dir / args.output;
  write_image_pgm(aug.apply(image), out, maxval, !args.plain);
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

int cmd_score(const GlobalArgs& global, const ScoreArgs& args) {
  const Temperature t(args.temperature);
  const VectorTable raw = read_vector_csv(args.raw);
  const VectorTable aug = read_vector_csv(args.aug);
  if (raw.kind != aug.kind) throw InputError("--raw and --aug must both hold probabilities or both hold logits");
  if (raw.rows.size() != aug.rows.size()) {
    throw InputError("row count mismatch: raw has " + std::to_string(raw.rows.size()) + ", aug has " +
                     std::to_string(aug.rows.size()));
  }

  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<SampleScores> scores;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const LabeledVector& r = raw.rows[i];
    const LabeledVector& a = aug.rows[i];
    const std::string where = "row " + std::to_string(i + 1) + ": ";
    if (r.values.size() != a.values.size()) {
      throw InputError(where + "K mismatch (" + std::to_string(r.values.size()) + " vs " +
                       std::to_string(a.values.size()) + ")");
    }
    if (r.label != a.label) throw InputError(where + "labels differ between raw and aug");
    if (raw.kind == VectorKind::Logits) {
      scores.push_back(score_pipeline(r.values, a.values, t));
    } else {
      scores.push_back(score_probabilities(r.values, a.values));
    }
    ids.push_back(r.id);
    labels.push_back(r.label);
  }

  fs::path out = global.out_dir / args.output;
  if (json_format(global)) {
    out.replace_extension(".json");
    write_scores_json(ids, labels, scores, out);
  } else {
    write_scores_csv(ids, labels, scores, out);
  }
  std::cout << "scored " << scores.size() << " rows -> " << out.string() << '\n';
  return 0;
}

int cmd_eval(const GlobalArgs& global, const EvalArgs& args) {
  if (args.slices < 1) throw InputError("--slices must be at least 1");
  if (args.bins < 1) throw InputError("--bins must be at least 1");
  const ScoreTable table = read_score_table(args.scores);
  std::string column = args.column;
  if (column.empty()) column = table.has("anomaly") ? "anomaly" : "score";
  const std::vector<ScoreRecord> records = table.records(column);

  EvaluationSummary summary;
  summary.auroc = auroc(records);
  for (const auto& r : records) (r.label == Label::In ? summary.n_in : summary.n_out) += 1;
  summary.histogram = histogram(records, static_cast<std::size_t>(args.bins));
  const std::vector<SliceSample> samples = slice_samples_from_table(table);
  if (!samples.empty()) summary.slices = slice_analysis(samples, static_cast<std::size_t>(args.slices));

  json doc = json::parse(summary_json(summary));
  doc["column"] = column;
  write_json(doc, global.out_dir / "evaluation.json");
  write_roc_csv(roc_curve(records), global.out_dir / "roc.csv");
  write_histogram_csv(summary.histogram, global.out_dir / "histogram.csv");
  write_slices_csv(summary.slices, global.out_dir / "slices.csv");
  std::cout << "auroc " << format_short(summary.auroc) << " (" << column << ", " << summary.n_in << " in, "
            << summary.n_out << " out)\n";
  return 0;
}

int cmd_demo(const GlobalArgs& global, const DemoArgs& args) {
  if (args.slices < 1) throw InputError("--slices must be at least 1");
  if (args.bins < 1) throw InputError("--bins must be at least 1");
  const HarnessArgs& h = args.harness;
  const Augmentation aug =
      make_augmentation(h.transform, h.transform == "fft" ? std::optional<double>(h.radius) : std::nullopt);
  const Temperature t(h.temperature);
  const Temperature slice_t(args.slice_temperature);

  const TrainedFixture fx = train_fixture(h, global.seed);
  const auto records = run_ttaad(fx.trained.classifier, fx.data.test_in, fx.data.test_out, aug, t, h.threads);

  json aurocs = json::object();
  for (Scorer scorer : {Scorer::Anomaly, Scorer::Remaining, Scorer::Msp}) {
    const std::string name(to_string(scorer));
    const auto projected = records_for(records, scorer);
    write_records_csv(projected, global.out_dir / ("scores_" + name + ".csv"));
    aurocs[name] = auroc(projected);
  }

  // Slices are taken on the raw prediction, at their own temperature.
  std::vector<SliceSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    const SampleScores s = score_pipeline(r.raw_logits, r.aug_logits, slice_t);
    samples.push_back({r.label, s.pmax, s.remaining});
  }

  const auto anomaly = records_for(records, Scorer::Anomaly);
  EvaluationSummary summary;
  summary.auroc = aurocs["anomaly"].get<double>();
  summary.n_in = fx.data.test_in.size();
  summary.n_out = fx.data.test_out.size();
  summary.histogram = histogram(anomaly, static_cast<std::size_t>(args.bins));
  summary.slices = slice_analysis(samples, static_cast<std::size_t>(args.slices));

  json doc = json::parse(summary_json(summary));
  doc["aurocs"] = aurocs;
  doc["train_accuracy"] = fx.trained.train_accuracy;
  doc["final_loss"] = number_or_null(fx.trained.final_loss);
  doc["transform"] = h.transform;
  if (h.transform == "fft") doc["radius"] = h.radius;
  doc["temperature"] = h.temperature;
  doc["slice_temperature"] = args.slice_temperature;
  write_json(doc, global.out_dir / "evaluation.json");
  write_slices_csv(summary.slices, global.out_dir / "slices.csv");

  std::cout << "train accuracy " << format_short(fx.trained.train_accuracy) << '\n';
  for (const auto& [name, value] : aurocs.items()) {
    std::cout << "auroc " << name << ' ' << format_short(value.get<double>()) << '\n';
  }
  return 0;
}

int cmd_ablate(const GlobalArgs& global, const AblateArgs& args) {
  if (args.radii.empty() && args.temperatures.empty()) {
    throw InputError("ablate needs a non-empty --radii or --temperatures list");
  }
  const HarnessArgs& h = args.harness;
  const TrainedFixture fx = train_fixture(h, global.seed);
  const auto& clf = fx.trained.classifier;

  struct Row {
    std::string name;
    double value;
    double auroc;
  };
  std::vector<Row> rows;
  auto run = [&](const Augmentation& aug, double t) {
    return auroc(records_for(run_ttaad(clf, fx.data.test_in, fx.data.test_out, aug, Temperature(t), h.threads),
                             Scorer::Anomaly));
  };
  for (double r : args.radii) rows.push_back({"radius", r, run(Augmentation::fft(r), h.temperature)});
  for (double t : args.temperatures) {
    const Augmentation aug = h.transform == "fft" ? Augmentation::fft(h.radius) : Augmentation::flip();
    rows.push_back({"temperature", t, run(aug, t)});
  }

  fs::path out = global.out_dir / args.output;
  if (json_format(global)) {
    out.replace_extension(".json");
    json doc = json::array();
    for (const auto& r : rows) doc.push_back({{"param_name", r.name}, {"param_value", r.value}, {"auroc", r.auroc}});
    write_json(doc, out);
  } else {
    auto file = open_output(out);
    file << "param_name,param_value,auroc\n";
    for (const auto& r : rows) file << r.name << ',' << format_real(r.value) << ',' << format_real(r.auroc) << '\n';
  }
  for (const auto& r : rows) std::cout << r.name << ' ' << format_short(r.value) << " auroc " << format_short(r.auroc) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// runs

namespace {

BetaParams require_beta(const PdfOnUnit& pdf, const char* flag) {
  if (!pdf.beta_params()) throw InputError(std::string(flag) + " must be a Beta density for this mode");
  return *pdf.beta_params();
}

std::vector<double> read_samples(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string first;
  if (!std::getline(in, first)) throw InputError(path.string() + ": empty file");
  double probe = 0.0;
  bool plain = true;
  try {
    probe = parse_real(first, "sample");
  } catch (const InputError&) {
    plain = false;
  }
  if (!plain) {
    in.close();
    std::vector<double> values;
    for (const auto& r : read_records_csv(path, column)) values.push_back(r.score);
    return values;
  }
  std::vector<double> values{probe};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    values.push_back(parse_real(line, "sample on line " + std::to_string(line_no)));
  }
  return values;
}

fs::path report_path(const GlobalArgs& global, const std::string& mode) {
  return global.out_dir / ("runs_" + mode + (json_format(global) ? ".json" : ".csv"));
}

json beta_json(const std::optional<BetaParams>& p) {
  if (!p) return nullptr;
  return {{"alpha", p->alpha()}, {"beta", p->beta()}};
}

int runs_count(const GlobalArgs& global, const RunsArgs& args) {
  const BinarySequence seq = parse_bits(args.bits);
  const std::size_t runs = count_runs(seq);
  if (json_format(global)) {
    write_json({{"bits", args.bits}, {"runs", runs}}, report_path(global, "count"));
  } else {
    auto out = open_output(report_path(global, "count"));
    out << "bits,runs\n" << args.bits << ',' << runs << '\n';
  }
  std::cout << runs << '\n';
  return 0;
}

int runs_expected(const GlobalArgs& global, const RunsArgs& args, bool with_mc) {
  const PdfOnUnit f = PdfOnUnit::parse(args.f);
  const PdfOnUnit g = PdfOnUnit::parse(args.g);
  const SampleSizes n(args.n1, args.n2);
  if (with_mc && args.trials < 1) throw InputError("--trials must be at least 1");

  SweepRow row;
  row.p1 = f.beta_params();
  row.p2 = g.beta_params();
  row.n1 = n.n1();
  row.n2 = n.n2();
  row.er_quadrature = expected_runs_quadrature(f, g, n);
  if (with_mc) row.er_mc = expected_runs_mc(f, g, n, static_cast<std::size_t>(args.trials), global.seed, args.threads);
  if (row.p1 && row.p2) row.regime = lemma3_condition(*row.p1, *row.p2);

  const std::string mode = with_mc ? "mc" : "quadrature";
  if (json_format(global)) {
    json doc = {{"f", f.descriptor()},
                {"g", g.descriptor()},
                {"p1", beta_json(row.p1)},
                {"p2", beta_json(row.p2)},
                {"n1", row.n1},
                {"n2", row.n2},
                {"er_quadrature", *row.er_quadrature}};
    if (row.er_mc) {
      doc["er_mc_mean"] = row.er_mc->mean;
      doc["er_mc_stderr"] = row.er_mc->std_error;
      doc["trials"] = row.er_mc->trials;
      doc["mc_over_quadrature"] = number_or_null(row.er_mc->mean / *row.er_quadrature);
    }
    doc["regime"] = row.regime ? json(std::string(to_string(*row.regime))) : json(nullptr);
    write_json(doc, report_path(global, mode));
  } else {
    write_sweep_csv({row}, report_path(global, mode));
  }

  std::cout << "quadrature " << format_short(*row.er_quadrature) << '\n';
  if (row.er_mc) {
    std::cout << "mc " << format_short(row.er_mc->mean) << " +/- " << format_short(row.er_mc->std_error) << '\n';
  }
  return 0;
}

int runs_derivative(const GlobalArgs& global, const RunsArgs& args) {
  const BetaParams p1 = require_beta(PdfOnUnit::parse(args.f), "--f");
  const BetaParams p2 = require_beta(PdfOnUnit::parse(args.g), "--g");
  const SampleSizes n(args.n1, args.n2);
  const BetaParameter which = parse_beta_parameter(args.which);
  const double er = expected_runs_beta(p1, p2, n, 1e-10);
  const double d = expected_runs_derivative(p1, p2, n, which, args.h);
  const Lemma3Regime regime = lemma3_condition(p1, p2);
  const double tol = 1e-6 * er;

  if (json_format(global)) {
    write_json({{"p1", beta_json(p1)},
                {"p2", beta_json(p2)},
                {"n1", n.n1()},
                {"n2", n.n2()},
                {"which", to_string(which)},
                {"h", args.h},
                {"derivative", d},
                {"expected_runs", er},
                {"tolerance", tol},
                {"regime", to_string(regime)}},
               report_path(global, "derivative"));
  } else {
    auto out = open_output(report_path(global, "derivative"));
    out << "alpha1,beta1,alpha2,beta2,n1,n2,which,h,derivative,expected_runs,tolerance,regime\n";
    out << format_real(p1.alpha()) << ',' << format_real(p1.beta()) << ',' << format_real(p2.alpha()) << ','
        << format_real(p2.beta()) << ',' << n.n1() << ',' << n.n2() << ',' << to_string(which) << ','
        << format_real(args.h) << ',' << format_real(d) << ',' << format_real(er) << ',' << format_real(tol) << ','
        << to_string(regime) << '\n';
  }
  std::cout << "d/d" << to_string(which) << ' ' << format_short(d) << " (" << to_string(regime) << ")\n";
  return 0;
}

int runs_maximality(const GlobalArgs& global, const RunsArgs& args) {
  const BetaParams g = require_beta(PdfOnUnit::parse(args.g), "--g");
  if (args.candidates.empty()) throw InputError("maximality needs at least one --candidates entry");
  std::vector<BetaParams> candidates;
  for (const auto& c : args.candidates) candidates.push_back(require_beta(PdfOnUnit::parse(c), "--candidates"));
  const MaximalityReport report = maximality_sweep(g, candidates, SampleSizes(args.n1, args.n2));

  if (json_format(global)) {
    json rows = json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"alpha", r.params.alpha()}, {"beta", r.params.beta()}, {"expected_runs", r.expected_runs}});
    }
    write_json({{"reference", beta_json(report.reference)},
                {"reference_runs", report.reference_runs},
                {"candidates", rows},
                {"holds", report.holds},
                {"min_margin", report.min_margin ? json(*report.min_margin) : json(nullptr)}},
               report_path(global, "maximality"));
  } else {
    auto out = open_output(report_path(global, "maximality"));
    out << "alpha,beta,expected_runs,margin\n";
    out << format_real(g.alpha()) << ',' << format_real(g.beta()) << ',' << format_real(report.reference_runs)
        << ",0\n";
    for (const auto& r : report.rows) {
      out << format_real(r.params.alpha()) << ',' << format_real(r.params.beta()) << ','
          << format_real(r.expected_runs) << ',' << format_real(report.reference_runs - r.expected_runs) << '\n';
    }
  }
  std::cout << "maximality " << (report.holds ? "holds" : "violated");
  if (report.min_margin) std::cout << " (min margin " << format_short(*report.min_margin) << ')';
  std::cout << '\n';
  return 0;
}

int runs_fit(const GlobalArgs& global, const RunsArgs& args) {
  if (args.samples.empty()) throw InputError("fit needs --samples");
  const std::vector<double> values = read_samples(args.samples, args.column);
  const BetaParams p = beta_fit(values);
  if (json_format(global)) {
    write_json({{"alpha", p.alpha()}, {"beta", p.beta()}, {"n", values.size()}}, report_path(global, "fit"));
  } else {
    auto out = open_output(report_path(global, "fit"));
    out << "alpha,beta,n\n" << format_real(p.alpha()) << ',' << format_real(p.beta()) << ',' << values.size() << '\n';
  }
  std::cout << p.describe() << '\n';
  return 0;
}

}  // namespace

int cmd_runs(const GlobalArgs& global, const RunsArgs& args) {
  if (args.mode == "count") return runs_count(global, args);
  if (args.mode == "mc") return runs_expected(global, args, true);
  if (args.mode == "quadrature") return runs_expected(global, args, false);
  if (args.mode == "derivative") return runs_derivative(global, args);
  if (args.mode == "maximality") return runs_maximality(global, args);
  if (args.mode == "fit") return runs_fit(global, args);
  throw InputError("unknown --mode '" + args.mode + "'");
}

}  // namespace ttaad::cli
