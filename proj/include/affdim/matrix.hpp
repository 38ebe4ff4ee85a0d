#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace affdim {

using Vector = std::vector<double>;

/// Dense real matrix stored row-major. Sized for the small problems this
/// library deals with (dimension at most a few dozen after Kronecker and
/// exterior-power constructions), so there is no expression-template layer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Row-major entries; throws ShapeError if `entries.size() != rows * cols`
  /// and DomainError on non-finite values.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested rows, e.g. `Matrix{{1, 3}, {0, 1}}`.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  Vector column(std::size_t c) const;

  Matrix transpose() const;
  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scalar) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(double scalar, Matrix m);
Vector operator*(const Matrix& m, std::span<const double> v);

/// out = lhs * rhs without allocating; `out` must already have the right shape
/// and must not alias either operand.
void multiply_into(const Matrix& lhs, const Matrix& rhs, Matrix& out) noexcept;

/// Largest entrywise absolute difference; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

}  // namespace affdim
