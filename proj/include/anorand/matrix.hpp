#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace anorand {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  // Copies of the listed rows, in the listed order.
  Matrix select_rows(std::span<const std::size_t> indices) const;
  // Copy of columns [first, first + count).
  Matrix slice_cols(std::size_t first, std::size_t count) const;

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a · b
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ · b
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
// a · bᵀ
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

// [a | b] along columns.
Matrix hconcat(const Matrix& a, const Matrix& b);
// a stacked on top of b.
Matrix vconcat(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Throws DimensionError naming both shapes when they differ.
void require_same_shape(const Matrix& a, const Matrix& b, const char* context);

}  // namespace anorand
