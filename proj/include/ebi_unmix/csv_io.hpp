#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ebi_unmix/signal.hpp"

namespace ebi {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvDocument {
  SignalMatrix signal;
  /// Every `# key=value` line in file order, including rate_hz.
  Metadata metadata;
};

// File layout:
//   # rate_hz=1000          (required; further `# key=value` lines allowed)
//   label1,label2,...       (header)
//   1.0,2.0,...             (one row per sample)

CsvDocument read_csv_document(std::istream& in);
CsvDocument read_csv_document(const std::filesystem::path& path);
SignalMatrix read_csv(const std::filesystem::path& path);

/// Values are written in shortest round-trip form, so reading the file back
/// reproduces them exactly. `extra` lines follow `rate_hz`.
void write_csv(const SignalMatrix& signal, std::ostream& out, const Metadata& extra = {});
void write_csv(const SignalMatrix& signal, const std::filesystem::path& path,
               const Metadata& extra = {});

/// Header row plus numeric rows, no rate line; used for mixing matrices.
struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> labels;
};

LabeledMatrix read_matrix_csv(std::istream& in);
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::vector<std::string>& labels, std::ostream& out);
void write_matrix_csv(const Matrix& m, const std::vector<std::string>& labels,
                      const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace ebi
