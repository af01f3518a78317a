#ifndef TTAAD_TOOLS_COMMANDS_HPP
#define TTAAD_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ttaad::cli {

inline constexpr const char* kVersion = "0.1.0";

struct GlobalArgs {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::filesystem::path out_dir = "out";
  std::string format = "csv";
};

struct TransformArgs {
  std::filesystem::path input;
  std::string transform;
  std::optional<double> radius;
  std::string output = "transformed.pgm";
  bool plain = false;
};

struct ScoreArgs {
  std::filesystem::path raw;
  std::filesystem::path aug;
  double temperature = 5.0;
  std::string output = "scores.csv";
};

struct EvalArgs {
  std::filesystem::path scores;
  std::string column;
  int slices = 50;
  int bins = 50;
};

/// Synthetic-data pipeline flags shared by `demo` and `ablate`.
struct HarnessArgs {
  int classes = 4;
  int size = 32;
  int n_train = 200;
  int n_in = 200;
  int n_out = 200;
  double noise = 0.1;
  int epochs = 300;
  double lr = 0.5;
  std::string transform = "fft";
  double radius = 6.0;
  double temperature = 5.0;
  unsigned threads = 1;
};

struct DemoArgs {
  HarnessArgs harness;
  int slices = 50;
  int bins = 50;
  double slice_temperature = 1.0;
};

struct AblateArgs {
  HarnessArgs harness;
  std::vector<double> radii;
  std::vector<double> temperatures;
  std::string output = "ablation.csv";
};

struct RunsArgs {
  std::string mode;
  std::string bits;
  std::string f = "uniform";
  std::string g = "uniform";
  long n1 = 100;
  long n2 = 100;
  long trials = 10000;
  unsigned threads = 1;
  std::string which = "alpha1";
  double h = 1e-4;
  std::vector<std::string> candidates;
  std::filesystem::path samples;
  std::string column = "score";
};

int cmd_transform(const GlobalArgs& global, const TransformArgs& args);
int cmd_score(const GlobalArgs& global, const ScoreArgs& args);
int cmd_eval(const GlobalArgs& global, const EvalArgs& args);
int cmd_demo(const GlobalArgs& global, const DemoArgs& args);
int cmd_ablate(const GlobalArgs& global, const AblateArgs& args);
int cmd_runs(const GlobalArgs& global, const RunsArgs& args);

}  // namespace ttaad::cli

#endif  // TTAAD_TOOLS_COMMANDS_HPP
