#ifndef TTAAD_DATA_IO_HPP
#define TTAAD_DATA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ttaad/image.hpp"

namespace ttaad {

/// Binary membership flag. OUT is the positive class for every metric.
enum class Label : std::uint8_t { In, Out };

std::string_view to_string(Label label);
/// Accepts "in" / "out" (case-sensitive, as written by the writers).
Label parse_label(std::string_view text);

struct ScoreRecord {
  double score = 0.0;
  Label label = Label::In;
  std::string id;
};

/// A probability or logit vector together with its sample label.
struct LabeledVector {
  std::string id;
  Label label = Label::In;
  Eigen::VectorXd values;
};

enum class VectorKind { Probabilities, Logits };

/// Rows of a `label,p0,..` (probabilities) or `label,z0,..` (logits) file.
struct VectorTable {
  VectorKind kind = VectorKind::Probabilities;
  std::vector<LabeledVector> rows;
};

struct PgmFile {
  Image image;
  int maxval = 255;
};

// ---------------------------------------------------------------------------
// Images

/// Reads a plain (P2) or binary (P5) PGM. Pixels are divided by maxval.
/// Errors carry the byte offset at which parsing failed.
PgmFile read_pgm(const std::filesystem::path& path);
Image read_image_pgm(const std::filesystem::path& path);

/// Grayscale if `path` is a file; otherwise looks for `<path>.r.pgm`, `<path>.g.pgm`
/// and `<path>.b.pgm` and stacks them as three channels.
Image read_image(const std::filesystem::path& path);

/// Writes P5 (or P2 when `binary` is false). Values are quantized as round(v * maxval).
/// A 3-channel image is written as `<path>.r.pgm`, `<path>.g.pgm`, `<path>.b.pgm`.
void write_image_pgm(const Image& image, const std::filesystem::path& path, int maxval = 255,
                     bool binary = true);

// ---------------------------------------------------------------------------
// Probability / logit vectors

/// Parses `label,p0,...,p{K-1}` (optionally preceded by an `id` column).
/// Probability rows whose sum is within 1e-6 of one are renormalized; anything
/// else is rejected with the offending row number.
std::vector<LabeledVector> read_prob_csv(const std::filesystem::path& path);

/// Same as read_prob_csv but also accepts logit files (`z0,...` columns), which
/// are only checked for finiteness.
VectorTable read_vector_csv(const std::filesystem::path& path);

void write_prob_csv(const std::vector<LabeledVector>& rows, const std::filesystem::path& path);

/// Checks a probability vector in place: K >= 2, entries in [0,1], sum within
/// 1e-6 of one (then renormalized). `row` is used in the error message only.
void validate_probabilities(Eigen::VectorXd& probs, std::size_t row);

// ---------------------------------------------------------------------------
// Score records

/// Header `id,label,score`; scores use 17 significant digits.
void write_records_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path);

/// Columns of a score file: `label` is required, `id` optional, every other
/// column must be numeric.
struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<Label> labels;
  std::vector<std::string> column_order;
  std::map<std::string, std::vector<double>> columns;

  bool has(const std::string& name) const { return columns.count(name) != 0; }
  std::vector<ScoreRecord> records(const std::string& column) const;
};

ScoreTable read_score_table(const std::filesystem::path& path);

/// Records from one numeric column (default `score`) of a score file.
std::vector<ScoreRecord> read_records_csv(const std::filesystem::path& path,
                                          const std::string& column = "score");

// ---------------------------------------------------------------------------
// Formatting helpers shared by writers

/// 17 significant digits; reading the text back gives the same double.
std::string format_real(double value);
/// Shortest representation that round-trips; used in messages.
std::string format_short(double value);

/// Parses a full cell as a double; throws InputError naming `what` on failure.
double parse_real(std::string_view cell, const std::string& what);

/// Splits one CSV line on commas (no quoting: ids must not contain commas).
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace ttaad

#endif  // TTAAD_DATA_IO_HPP
