#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace dmilp {

using Vector = std::vector<double>;

// Dense row-major matrix. Sizes in this project are desk-scale, so no sparse
// storage is attempted.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, Vector data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("Matrix: data size does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const Vector& data() const { return data_; }

  // Appends a row; the first row on an empty 0x0 matrix fixes the width.
  void append_row(std::span<const double> values);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

double dot(std::span<const double> a, std::span<const double> b);
// y = M x
Vector multiply(const Matrix& m, std::span<const double> x);
// y = M^T x
Vector multiply_transposed(const Matrix& m, std::span<const double> x);
double norm_inf(std::span<const double> v);
double row_norm_inf(const Matrix& m, std::size_t r);

}  // namespace dmilp
