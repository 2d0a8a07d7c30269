#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ebi {

/// Dense real matrix stored row-major. Rows are samples and columns are
/// channels whenever a matrix holds a signal block.
///
/// Constructors reject empty shapes and non-finite entries; element access
/// through `operator()` is unchecked.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_columns(const std::vector<std::vector<double>>& columns);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  /// First `count` columns.
  Matrix left_columns(std::size_t count) const;
  /// Rows [first, first + count).
  Matrix row_block(std::size_t first, std::size_t count) const;

  Matrix transposed() const;

  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Aᵀ·B without forming the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
/// Largest |a(i,j) - b(i,j)|; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);
/// max |(MᵀM)(i,j) - δij|, the column-orthonormality defect.
double orthonormality_defect(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ebi
