#include "ebi_unmix/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "ebi_unmix/error.hpp"

namespace ebi {

std::string message_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::filter_design: return "filter-design";
    case ErrorKind::unstable_filter: return "unstable-filter";
    case ErrorKind::degenerate_dimension: return "degenerate-dimension";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::undefined_correlation: return "undefined-correlation";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::parse: return "parse";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::dimension, "matrix shape must be at least 1x1, got " +
                                          std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void check_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "matrix entry is not finite");
  }
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::dimension, std::string(op) + ": shape mismatch " +
                                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                          " vs " + std::to_string(b.rows()) + "x" +
                                          std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
  if (!std::isfinite(fill)) throw Error(ErrorKind::invalid_input, "matrix fill is not finite");
  data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  check_shape(rows, cols);
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::dimension, "entry count " + std::to_string(data_.size()) +
                                          " does not match " + std::to_string(rows) + "x" +
                                          std::to_string(cols));
  }
  check_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  check_shape(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorKind::dimension, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw Error(ErrorKind::dimension, "no columns");
  const std::size_t n = columns.front().size();
  Matrix m(n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != n) throw Error(ErrorKind::dimension, "columns differ in length");
    check_finite(columns[c]);
    m.set_column(c, columns[c]);
  }
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  check_finite(values);
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw Error(ErrorKind::dimension, "column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::left_columns(std::size_t count) const {
  if (count == 0 || count > cols_) {
    throw Error(ErrorKind::dimension, "cannot take " + std::to_string(count) + " of " +
                                          std::to_string(cols_) + " columns");
  }
  Matrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, c);
  }
  return out;
}

Matrix Matrix::row_block(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > rows_) {
    throw Error(ErrorKind::dimension, "row block out of range");
  }
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
  return Matrix(count, cols_,
                std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::dimension, "product: inner dimensions " + std::to_string(a.cols()) +
                                          " and " + std::to_string(b.rows()) + " differ");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::dimension, "transpose_times: row counts differ");
  Matrix out(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto a_row = a.row(r);
    auto b_row = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = a_row[i];
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ai * b_row[j];
    }
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sum");
  Matrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) += b(r, c);
  }
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "difference");
  Matrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) -= b(r, c);
  }
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (double& v : out.row(r)) v *= s;
  }
  return out;
}

double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return std::sqrt(sum);
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "max_abs_diff");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  }
  return best;
}

double orthonormality_defect(const Matrix& m) {
  return max_abs_diff(transpose_times(m, m), Matrix::identity(m.cols()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension, "dot: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace ebi
