// Command-line front end: transform, score, eval, ablate, runs, demo.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "commands.hpp"
#include "ttaad/error.hpp"

namespace {

using namespace ttaad::cli;
using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Harness runs default to the fixture seed unless --seed is passed explicitly.
constexpr std::uint64_t kHarnessSeed = 7;

void add_harness_flags(CLI::App* sub, HarnessArgs& h) {
  sub->add_option("--classes", h.classes, "number of in-distribution classes");
  sub->add_option("--size", h.size, "image height and width in pixels");
  sub->add_option("--n-train", h.n_train, "training images per class");
  sub->add_option("--n-in", h.n_in, "in-distribution test images");
  sub->add_option("--n-out", h.n_out, "out-distribution test images");
  sub->add_option("--noise", h.noise, "Gaussian pixel noise sigma");
  sub->add_option("--epochs", h.epochs, "gradient descent epochs");
  sub->add_option("--lr", h.lr, "learning rate");
  sub->add_option("--transform", h.transform, "augmentation")->check(CLI::IsMember({"fft", "flip"}));
  sub->add_option("--radius", h.radius, "low-pass radius in pixels (fft)");
  sub->add_option("--temperature", h.temperature, "softmax temperature");
  sub->add_option("--threads", h.threads, "scoring threads");
}

json option_value(const CLI::Option* opt) {
  if (opt->count() == 0) {
    if (opt->get_expected_max() > 1) return json::array();
    const std::string def = opt->get_default_str();
    return def.empty() ? json(nullptr) : json(def);
  }
  const auto& results = opt->results();
  if (opt->get_type_size() == 0) return true;  // flag
  if (results.size() == 1 && opt->get_expected_max() <= 1) return results.front();
  return results;
}

json collect_flags(const CLI::App& app, const CLI::App* sub) {
  json flags = json::object();
  for (const CLI::App* level : {&app, sub}) {
    for (const CLI::Option* opt : level->get_options()) {
      if (opt->get_name() == "--help" || opt->get_name() == "--version") continue;
      flags[opt->get_name()] = option_value(opt);
    }
  }
  return flags;
}

void write_manifest(const GlobalArgs& global, const std::string& subcommand, const json& flags) {
  std::filesystem::create_directories(global.out_dir);
  const json doc = {{"subcommand", subcommand}, {"flags", flags}, {"seed", global.seed}, {"version", kVersion}};
  std::ofstream out(global.out_dir / "run-manifest.json");
  if (!out) throw ttaad::InputError("cannot write manifest in " + global.out_dir.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistency-based anomaly scoring toolkit", "ttaad"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  GlobalArgs global;
  std::string out_dir = global.out_dir.string();
  auto* seed_opt = app.add_option("--seed", global.seed, "random seed");
  app.add_option("--out-dir", out_dir, "directory for every output file");
  app.add_option("--format", global.format, "report format")->check(CLI::IsMember({"csv", "json"}));

  TransformArgs transform;
  double transform_radius = 0.0;
  auto* t_cmd = app.add_subcommand("transform", "apply an augmentation to a PGM image");
  t_cmd->add_option("--input", transform.input, "input PGM (or colour stem)")->required();
  t_cmd->add_option("--transform", transform.transform, "fft or flip")
      ->required()
      ->check(CLI::IsMember({"fft", "flip"}));
  auto* t_radius = t_cmd->add_option("--radius", transform_radius, "low-pass radius in pixels")->default_str("");
  t_cmd->add_option("--output", transform.output, "output file name inside --out-dir");
  t_cmd->add_flag("--plain", transform.plain, "write ASCII P2 instead of binary P5");

  ScoreArgs score;
  auto* s_cmd = app.add_subcommand("score", "score aligned raw/augmented probability or logit files");
  s_cmd->add_option("--raw", score.raw, "predictions on the original inputs")->required();
  s_cmd->add_option("--aug", score.aug, "predictions on the augmented inputs")->required();
  s_cmd->add_option("--temperature", score.temperature, "softmax temperature for logit files");
  s_cmd->add_option("--output", score.output, "output file name inside --out-dir");

  EvalArgs eval;
  auto* e_cmd = app.add_subcommand("eval", "AUROC, ROC, histogram and slice statistics of a score file");
  e_cmd->add_option("--scores", eval.scores, "score CSV")->required();
  e_cmd->add_option("--column", eval.column, "score column (default: anomaly if present, else score)");
  e_cmd->add_option("--slices", eval.slices, "number of max-probability slices");
  e_cmd->add_option("--bins", eval.bins, "histogram bins");

  AblateArgs ablate;
  auto* a_cmd = app.add_subcommand("ablate", "AUROC over filter radii and temperatures on the synthetic fixture");
  add_harness_flags(a_cmd, ablate.harness);
  a_cmd->add_option("--radii", ablate.radii, "filter radii")->delimiter(',');
  a_cmd->add_option("--temperatures", ablate.temperatures, "temperatures")->delimiter(',');
  a_cmd->add_option("--output", ablate.output, "output file name inside --out-dir");

  RunsArgs runs;
  auto* r_cmd = app.add_subcommand("runs", "runs statistics and expected-runs analysis");
  r_cmd->add_option("--mode", runs.mode, "operation")
      ->required()
      ->check(CLI::IsMember({"count", "mc", "quadrature", "derivative", "maximality", "fit"}));
  r_cmd->add_option("--bits", runs.bits, "binary sequence for count");
  r_cmd->add_option("--f", runs.f, "IN density: uniform, uniform:lo,hi or beta:a,b");
  r_cmd->add_option("--g", runs.g, "OUT density");
  r_cmd->add_option("--n1", runs.n1, "IN sample size");
  r_cmd->add_option("--n2", runs.n2, "OUT sample size");
  r_cmd->add_option("--trials", runs.trials, "Monte Carlo trials");
  r_cmd->add_option("--threads", runs.threads, "Monte Carlo threads (0 = all cores)");
  r_cmd->add_option("--which", runs.which, "parameter to differentiate")
      ->check(CLI::IsMember({"alpha1", "beta1", "alpha2", "beta2"}));
  r_cmd->add_option("--step", runs.h, "finite-difference step");
  r_cmd->add_option("--candidates", runs.candidates, "candidate densities for maximality")->delimiter(';');
  r_cmd->add_option("--samples", runs.samples, "sample file for fit");
  r_cmd->add_option("--column", runs.column, "column of a CSV sample file");

  DemoArgs demo;
  auto* d_cmd = app.add_subcommand("demo", "end-to-end run on the synthetic fixture");
  add_harness_flags(d_cmd, demo.harness);
  d_cmd->add_option("--slices", demo.slices, "number of max-probability slices");
  d_cmd->add_option("--bins", demo.bins, "histogram bins");
  d_cmd->add_option("--slice-temperature", demo.slice_temperature, "temperature used for slice statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  global.out_dir = out_dir;
  global.seed_given = seed_opt->count() > 0;
  const CLI::App* sub = app.get_subcommands().front();
  const bool harness = sub == a_cmd || sub == d_cmd;
  if (harness && !global.seed_given) global.seed = kHarnessSeed;

  try {
    json flags = collect_flags(app, sub);
    flags["--seed"] = std::to_string(global.seed);
    write_manifest(global, sub->get_name(), flags);
    if (sub == t_cmd) {
      if (t_radius->count() > 0) transform.radius = transform_radius;
      return cmd_transform(global, transform);
    }
    if (sub == s_cmd) return cmd_score(global, score);
    if (sub == e_cmd) return cmd_eval(global, eval);
    if (sub == r_cmd) return cmd_runs(global, runs);
    if (sub == a_cmd) return cmd_ablate(global, ablate);
    if (sub->get_option("--radius")->count() > 0 && demo.harness.transform == "flip") {
      throw ttaad::InputError("--radius only applies to --transform fft");
    }
    return cmd_demo(global, demo);
  } catch (const ttaad::UndefinedMetricError& e) {
    std::cerr << "error: undefined metric: " << e.what() << '\n';
    return kExitInput;
  } catch (const ttaad::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ttaad::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
