#include "affdim/matrix_tuple.hpp"

#include <cmath>
#include <string>

#include "affdim/error.hpp"
#include "affdim/linalg.hpp"

namespace affdim {

MatrixTuple::MatrixTuple(std::vector<Matrix> maps) : maps_(std::move(maps)) {
  if (maps_.size() < 2) {
    throw PreconditionError("matrix tuple: at least two maps are required, got " + std::to_string(maps_.size()));
  }
  dim_ = maps_.front().rows();
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const Matrix& m = maps_[i];
    if (!m.is_square() || m.rows() != dim_ || dim_ == 0) {
      throw ShapeError("matrix tuple: map " + std::to_string(i + 1) + " is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + ", expected " + std::to_string(dim_) + "x" +
                       std::to_string(dim_));
    }
    if (!m.all_finite()) throw DomainError("matrix tuple: map " + std::to_string(i + 1) + " has a non-finite entry");
    if (std::abs(determinant(m)) <= 1e-14) {
      throw PreconditionError("matrix tuple: map " + std::to_string(i + 1) + " is not invertible");
    }
    norms_.push_back(operator_norm(m));
    max_norm_ = std::max(max_norm_, norms_.back());
  }
}

void MatrixTuple::require_contracting() const {
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    if (norms_[i] >= 1.0) {
      throw PreconditionError("map " + std::to_string(i + 1) + " is not contracting (operator norm " +
                              std::to_string(norms_[i]) + " >= 1)");
    }
  }
}

MatrixTuple MatrixTuple::scaled(double c) const {
  std::vector<Matrix> out;
  out.reserve(maps_.size());
  for (const auto& m : maps_) out.push_back(c * m);
  return MatrixTuple(std::move(out));
}

MatrixTuple MatrixTuple::transposed() const {
  std::vector<Matrix> out;
  out.reserve(maps_.size());
  for (const auto& m : maps_) out.push_back(m.transpose());
  return MatrixTuple(std::move(out));
}

AffineIFS::AffineIFS(MatrixTuple linear, std::vector<Vector> translations)
    : linear_(std::move(linear)), translations_(std::move(translations)) {
  if (translations_.size() != linear_.arity()) {
    throw ShapeError("affine IFS: " + std::to_string(translations_.size()) + " translations for " +
                     std::to_string(linear_.arity()) + " maps");
  }
  for (std::size_t i = 0; i < translations_.size(); ++i) {
    if (translations_[i].size() != linear_.dimension()) {
      throw ShapeError("affine IFS: translation " + std::to_string(i + 1) + " has length " +
                       std::to_string(translations_[i].size()));
    }
    for (double x : translations_[i])
      if (!std::isfinite(x)) throw DomainError("affine IFS: non-finite translation entry");
  }
}

Vector AffineIFS::apply(std::size_t i, std::span<const double> x) const {
  Vector out(dimension());
  apply_into(i, x, out);
  return out;
}

void AffineIFS::apply_into(std::size_t i, std::span<const double> x, std::span<double> out) const noexcept {
  const Matrix& a = linear_[i];
  const Vector& v = translations_[i];
  const std::size_t d = dimension();
  for (std::size_t r = 0; r < d; ++r) {
    double s = v[r];
    for (std::size_t c = 0; c < d; ++c) s += a(r, c) * x[c];
    out[r] = s;
  }
}

Vector AffineIFS::fixed_point(std::size_t i) const {
  return solve(Matrix::identity(dimension()) - linear_[i], translations_[i]);
}

}  // namespace affdim
