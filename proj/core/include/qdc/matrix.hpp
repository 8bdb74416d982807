#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qdc {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Small value type used everywhere in
// the library; dimensions are desk scale (<= a few thousand).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  // Convenience constructor for tests and small literals.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix diag(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  Matrix transpose() const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
  friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
  friend Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
  friend Matrix operator*(double s, Matrix rhs) { return rhs *= s; }

  bool operator==(const Matrix& rhs) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

// C = A^T * B without forming transposes.
Matrix transpose_times(const Matrix& a, const Matrix& b);
// y = A^T * x.
Vector transpose_times(const Matrix& a, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
// <A, B> = Tr(A^T B), the Frobenius inner product.
double frobenius_dot(const Matrix& a, const Matrix& b);

// x * y^T as a rows(x) x rows(y) matrix.
Matrix outer(const Vector& x, const Vector& y);

bool all_finite(const Vector& v);

}  // namespace qdc
