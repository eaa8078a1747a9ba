#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sphlab {

/// Dense row-major matrix of doubles.
///
/// Sized for the small factorizations this library needs (n x k panels with
/// k << n, k x k Gram matrices); it is not a general linear algebra type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  /// Single column built from a vector.
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<double> col(std::size_t j) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  /// First `count` rows as a new matrix.
  Matrix top_rows(std::size_t count) const;
  /// Columns [first, first + count) as a new matrix.
  Matrix col_block(std::size_t first, std::size_t count) const;

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// A^T * B without forming the transpose.
Matrix multiply_tn(const Matrix& a, const Matrix& b);
/// A * x for a vector x.
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
/// A^T * x for a vector x.
std::vector<double> multiply_t(const Matrix& a, std::span<const double> x);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
/// max |A^T A - I| entrywise.
double orthonormality_defect(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_norm(std::span<const double> a);

}  // namespace sphlab
