#include "dmilp/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace dmilp {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) append_row(std::span<const double>(r.begin(), r.size()));
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw std::invalid_argument("Matrix::append_row: width mismatch");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector multiply(const Matrix& m, std::span<const double> x) {
  Vector y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
  return y;
}

Vector multiply_transposed(const Matrix& m, std::span<const double> x) {
  Vector y(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) y[c] += row[c] * x[r];
  }
  return y;
}

double norm_inf(std::span<const double> v) {
  double n = 0.0;
  for (double e : v) n = std::max(n, std::abs(e));
  return n;
}

double row_norm_inf(const Matrix& m, std::size_t r) { return norm_inf(m.row(r)); }

}  // namespace dmilp
