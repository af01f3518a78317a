#include "ttaad/data_io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace ttaad {

namespace {

constexpr double kProbSumTolerance = 1e-6;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode | std::ios::out | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// Cursor over a PGM buffer; every error reports the byte offset.
class PgmCursor {
 public:
  PgmCursor(const std::string& bytes, const std::filesystem::path& path) : bytes_(bytes), path_(path) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(path_.string() + ": " + what + " at byte offset " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) fail(std::string("truncated data: expected ") + what);
    long value = 0;
    const char* begin = bytes_.data() + pos_;
    const char* end = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail(std::string("malformed header: expected ") + what);
    if (ptr != end && !std::isspace(static_cast<unsigned char>(*ptr)) && *ptr != '#') {
      fail(std::string("malformed ") + what);
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  unsigned char byte_at(std::size_t offset) const { return static_cast<unsigned char>(bytes_[pos_ + offset]); }
  bool at_end() const { return pos_ >= bytes_.size(); }

 private:
  const std::string& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

bool is_prob_header(std::string_view name, std::size_t k, char prefix) {
  return name == std::string(1, prefix) + std::to_string(k);
}

}  // namespace

std::string_view to_string(Label label) { return label == Label::In ? "in" : "out"; }

Label parse_label(std::string_view text) {
  if (text == "in") return Label::In;
  if (text == "out") return Label::Out;
  throw InputError("unknown label '" + std::string(text) + "' (expected in or out)");
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return buf.data();
}

std::string format_short(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

double parse_real(std::string_view cell, const std::string& what) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw InputError(what + ": non-numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

// ---------------------------------------------------------------------------

PgmFile read_pgm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  PgmCursor cur(bytes, path);
  if (bytes.size() < 2 || bytes[0] != 'P') cur.fail("unsupported magic number");
  const char kind = bytes[1];
  if (kind != '2' && kind != '5') cur.fail("unsupported magic number 'P" + std::string(1, kind) + "'");
  cur.advance(2);
  if (!cur.at_end() && !std::isspace(cur.byte_at(0)) && cur.byte_at(0) != '#') {
    cur.fail("malformed header after magic number");
  }

  const long width = cur.read_uint("width");
  const long height = cur.read_uint("height");
  const long maxval = cur.read_uint("maxval");
  if (width < 1 || height < 1) cur.fail("malformed header: non-positive dimensions");
  if (maxval < 1 || maxval > 65535) cur.fail("malformed header: maxval must be in [1, 65535]");

  Plane<double> pixels(height, width);
  const double denom = static_cast<double>(maxval);
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);

  if (kind == '2') {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = cur.read_uint("pixel value");
      if (v < 0 || v > maxval) cur.fail("pixel value exceeds maxval");
      pixels.data()[i] = static_cast<double>(v) / denom;
    }
  } else {
    // Exactly one whitespace byte separates maxval from the raster.
    if (cur.at_end() || !std::isspace(cur.byte_at(0))) cur.fail("malformed header: missing raster separator");
    cur.advance(1);
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    if (cur.remaining() < count * bytes_per_sample) cur.fail("truncated data");
    for (std::size_t i = 0; i < count; ++i) {
      long v = cur.byte_at(0);
      if (bytes_per_sample == 2) v = (v << 8) | cur.byte_at(1);
      if (v > maxval) cur.fail("pixel value exceeds maxval");
      pixels.data()[i] = static_cast<double>(v) / denom;
      cur.advance(bytes_per_sample);
    }
  }
  return {Image(std::move(pixels)), static_cast<int>(maxval)};
}

Image read_image_pgm(const std::filesystem::path& path) { return read_pgm(path).image; }

Image read_image(const std::filesystem::path& path) {
  if (std::filesystem::is_regular_file(path)) return read_image_pgm(path);
  std::vector<Plane<double>> planes;
  for (const char* suffix : {".r.pgm", ".g.pgm", ".b.pgm"}) {
    const std::filesystem::path plane_path = path.string() + suffix;
    if (!std::filesystem::is_regular_file(plane_path)) {
      throw InputError("cannot open " + path.string() + " (neither a PGM file nor a .r/.g/.b.pgm stem)");
    }
    planes.push_back(read_image_pgm(plane_path).plane(0));
  }
  return Image(std::move(planes));
}

void write_image_pgm(const Image& image, const std::filesystem::path& path, int maxval, bool binary) {
  if (maxval < 1 || maxval > 65535) throw InputError("maxval must be in [1, 65535]");
  if (image.channels() == 3) {
    const char* suffixes[] = {".r.pgm", ".g.pgm", ".b.pgm"};
    for (Index c = 0; c < 3; ++c) {
      write_image_pgm(Image(image.plane(c)), path.string() + suffixes[c], maxval, binary);
    }
    return;
  }
  if (image.channels() != 1) throw InputError("PGM output needs 1 or 3 channels");

  auto out = open_for_write(path, std::ios::binary);
  out << (binary ? "P5" : "P2") << '\n' << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
  const auto& p = image.plane(0);
  for (Index y = 0; y < image.height(); ++y) {
    for (Index x = 0; x < image.width(); ++x) {
      const auto v = static_cast<unsigned>(std::lround(p(y, x) * maxval));
      if (!binary) {
        out << v << (x + 1 == image.width() ? '\n' : ' ');
      } else if (maxval > 255) {
        out.put(static_cast<char>((v >> 8) & 0xff));
        out.put(static_cast<char>(v & 0xff));
      } else {
        out.put(static_cast<char>(v));
      }
    }
  }
  finish_write(out, path);
}

// ---------------------------------------------------------------------------

void validate_probabilities(Eigen::VectorXd& probs, std::size_t row) {
  const std::string where = "row " + std::to_string(row);
  if (probs.size() < 2) throw InputError(where + ": need at least 2 classes");
  for (Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0 || probs[i] > 1.0) {
      throw InputError(where + ": probability " + format_short(probs[i]) + " outside [0,1]");
    }
  }
  const double sum = probs.sum();
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw InputError(where + ": probabilities sum to " + format_short(sum));
  }
  probs /= sum;
}

VectorTable read_vector_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header");
  const auto header = split_csv_line(lines.front());

  std::size_t first = 0;
  const bool has_id = !header.empty() && header[0] == "id";
  if (has_id) first = 1;
  if (header.size() < first + 3 || header[first] != "label") {
    throw InputError(path.string() + ": header must be [id,]label,p0,p1,... or [id,]label,z0,z1,...");
  }
  const char prefix = header[first + 1].empty() ? '?' : header[first + 1][0];
  if (prefix != 'p' && prefix != 'z') throw InputError(path.string() + ": unrecognized column " + std::string(header[first + 1]));
  const std::size_t k = header.size() - first - 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (!is_prob_header(header[first + 1 + i], i, prefix)) {
      throw InputError(path.string() + ": unexpected column '" + std::string(header[first + 1 + i]) + "'");
    }
  }

  VectorTable table;
  table.kind = prefix == 'p' ? VectorKind::Probabilities : VectorKind::Logits;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = "row " + std::to_string(r);
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    LabeledVector row;
    row.id = has_id ? std::string(cells[0]) : std::to_string(r);
    try {
      row.label = parse_label(cells[first]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    row.values.resize(static_cast<Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      row.values[static_cast<Index>(i)] = parse_real(cells[first + 1 + i], where);
    }
    if (table.kind == VectorKind::Probabilities) {
      validate_probabilities(row.values, r);
    } else if (!row.values.allFinite()) {
      throw InputError(where + ": non-finite logit");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<LabeledVector> read_prob_csv(const std::filesystem::path& path) {
  auto table = read_vector_csv(path);
  if (table.kind != VectorKind::Probabilities) {
    throw InputError(path.string() + ": expected probability columns p0,p1,...");
  }
  return std::move(table.rows);
}

void write_prob_csv(const std::vector<LabeledVector>& rows, const std::filesystem::path& path) {
  const Index k = rows.empty() ? 2 : rows.front().values.size();
  auto out = open_for_write(path);
  out << "id,label";
  for (Index i = 0; i < k; ++i) out << ",p" << i;
  out << '\n';
  for (const auto& row : rows) {
    if (row.values.size() != k) throw InputError("inconsistent vector length in write_prob_csv");
    out << row.id << ',' << to_string(row.label);
    for (Index i = 0; i < k; ++i) out << ',' << format_real(row.values[i]);
    out << '\n';
  }
  finish_write(out, path);
}

// ---------------------------------------------------------------------------

void write_records_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "id,label,score\n";
  for (const auto& r : records) {
    out << r.id << ',' << to_string(r.label) << ',' << format_real(r.score) << '\n';
  }
  finish_write(out, path);
}

std::vector<ScoreRecord> ScoreTable::records(const std::string& column) const {
  const auto it = columns.find(column);
  if (it == columns.end()) throw InputError("score file has no column '" + column + "'");
  std::vector<ScoreRecord> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back({it->second[i], labels[i], ids[i]});
  }
  return out;
}

ScoreTable read_score_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header");
  const auto header = split_csv_line(lines.front());

  ScoreTable table;
  std::ptrdiff_t id_col = -1;
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "id") {
      id_col = static_cast<std::ptrdiff_t>(c);
    } else if (header[c] == "label") {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      table.column_order.emplace_back(header[c]);
      table.columns[std::string(header[c])];
    }
  }
  if (label_col < 0) throw InputError(path.string() + ": header has no label column");

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = "row " + std::to_string(r);
    const auto cells = split_csv_line(lines[r]);
    if (cells.size() != header.size()) throw InputError(where + ": wrong number of cells");
    table.ids.push_back(id_col >= 0 ? std::string(cells[static_cast<std::size_t>(id_col)]) : std::to_string(r));
    try {
      table.labels.push_back(parse_label(cells[static_cast<std::size_t>(label_col)]));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == id_col || static_cast<std::ptrdiff_t>(c) == label_col) continue;
      const double v = parse_real(cells[c], where);
      if (!std::isfinite(v)) throw InputError(where + ": non-finite score");
      table.columns[std::string(header[c])].push_back(v);
    }
  }
  return table;
}

std::vector<ScoreRecord> read_records_csv(const std::filesystem::path& path, const std::string& column) {
  return read_score_table(path).records(column);
}

}  // namespace ttaad
