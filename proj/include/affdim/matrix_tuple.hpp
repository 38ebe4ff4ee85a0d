#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "affdim/matrix.hpp"

namespace affdim {

/// The linear parts (A_1, ..., A_N) of an affine IFS: at least two invertible
/// square matrices of a common dimension. Contraction is not required at
/// construction; operations that need it call require_contracting().
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<Matrix> maps);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t arity() const noexcept { return maps_.size(); }
  std::span<const Matrix> maps() const noexcept { return maps_; }
  const Matrix& operator[](std::size_t i) const noexcept { return maps_[i]; }

  /// Largest operator norm among the maps.
  double contraction_norm() const noexcept { return max_norm_; }
  bool is_contracting() const noexcept { return max_norm_ < 1.0; }

  /// Throws PreconditionError naming the first map with operator norm >= 1.
  void require_contracting() const;

  /// The tuple (c A_1, ..., c A_N).
  MatrixTuple scaled(double c) const;
  /// The tuple (A_1^T, ..., A_N^T).
  MatrixTuple transposed() const;

 private:
  std::vector<Matrix> maps_;
  std::vector<double> norms_;
  std::size_t dim_ = 0;
  double max_norm_ = 0.0;
};

/// Affine maps T_i x = A_i x + v_i.
class AffineIFS {
 public:
  AffineIFS(MatrixTuple linear, std::vector<Vector> translations);

  const MatrixTuple& linear() const noexcept { return linear_; }
  std::span<const Vector> translations() const noexcept { return translations_; }
  std::size_t dimension() const noexcept { return linear_.dimension(); }
  std::size_t arity() const noexcept { return linear_.arity(); }

  /// T_i x.
  Vector apply(std::size_t i, std::span<const double> x) const;
  /// Writes T_i x into `out` (sized dimension()).
  void apply_into(std::size_t i, std::span<const double> x, std::span<double> out) const noexcept;

  /// The fixed point (I - A_i)^{-1} v_i of T_i.
  Vector fixed_point(std::size_t i) const;

 private:
  MatrixTuple linear_;
  std::vector<Vector> translations_;
};

}  // namespace affdim
