#include "ebi_unmix/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string_view>

#include "ebi_unmix/error.hpp"

namespace ebi {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorKind::internal, "number formatting failed");
  return std::string(buf, ptr);
}

namespace {

struct Table {
  Metadata metadata;
  std::optional<double> rate;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t header_line = 0;
};

Table read_table(std::istream& in) {
  Metadata metadata;
  std::optional<double> rate;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::size_t header_line = 0;
  std::size_t rows = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (header_line != 0) continue;
      const std::string_view body = trim(line.substr(1));
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      std::string key(trim(body.substr(0, eq)));
      std::string value(trim(body.substr(eq + 1)));
      if (key == "rate_hz") {
        rate = parse_number(value);
        if (!rate || !(*rate > 0.0)) throw ParseError("rate_hz must be a positive number", line_no);
      }
      metadata.emplace_back(std::move(key), std::move(value));
      continue;
    }

    const auto cells = split(line);
    if (header_line == 0) {
      if (parse_number(cells.front())) {
        throw ParseError("missing header row of channel labels", line_no);
      }
      for (auto c : cells) {
        if (c.empty()) throw ParseError("empty channel label", line_no);
        labels.emplace_back(c);
      }
      header_line = line_no;
      continue;
    }

    if (cells.size() != labels.size()) {
      throw ParseError("expected " + std::to_string(labels.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw ParseError("non-numeric cell '" + std::string(cells[c]) + "' in column " +
                             std::to_string(c + 1),
                         line_no);
      }
      values.push_back(*v);
    }
    ++rows;
  }

  if (header_line == 0) throw ParseError("missing header row of channel labels", line_no);
  if (rows == 0) throw ParseError("no sample rows", line_no);
  return Table{std::move(metadata), rate, std::move(labels), std::move(values), rows,
               header_line};
}

}  // namespace

CsvDocument read_csv_document(std::istream& in) {
  Table t = read_table(in);
  if (!t.rate) throw ParseError("missing '# rate_hz=' comment line", t.header_line);
  const std::size_t cols = t.labels.size();
  return CsvDocument{
      SignalMatrix(Matrix(t.rows, cols, std::move(t.values)), *t.rate, std::move(t.labels)),
      std::move(t.metadata)};
}

LabeledMatrix read_matrix_csv(std::istream& in) {
  Table t = read_table(in);
  const std::size_t cols = t.labels.size();
  return LabeledMatrix{Matrix(t.rows, cols, std::move(t.values)), std::move(t.labels)};
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open " + path.string());
  return read_matrix_csv(in);
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& labels, std::ostream& out) {
  if (labels.size() != m.cols()) {
    throw Error(ErrorKind::dimension, "label count does not match matrix columns");
  }
  for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& labels,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
  write_matrix_csv(m, labels, out);
  if (!out) throw Error(ErrorKind::invalid_input, "write failed for " + path.string());
}

CsvDocument read_csv_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open " + path.string());
  return read_csv_document(in);
}

SignalMatrix read_csv(const std::filesystem::path& path) {
  return read_csv_document(path).signal;
}

void write_csv(const SignalMatrix& signal, std::ostream& out, const Metadata& extra) {
  out << "# rate_hz=" << format_double(signal.sample_rate_hz()) << '\n';
  for (const auto& [key, value] : extra) {
    if (key == "rate_hz") continue;
    out << "# " << key << '=' << value << '\n';
  }
  const auto& labels = signal.channel_labels();
  for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
  out << '\n';
  const Matrix& m = signal.samples();
  std::string line;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      line += format_double(m(r, c));
    }
    line += '\n';
    out << line;
  }
}

void write_csv(const SignalMatrix& signal, const std::filesystem::path& path,
               const Metadata& extra) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
  write_csv(signal, out, extra);
  if (!out) throw Error(ErrorKind::invalid_input, "write failed for " + path.string());
}

}  // namespace ebi
