#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "affdim/matrix.hpp"

namespace affdim {

/// One-sided Jacobi: a column pair counts as orthogonal once
/// |<w_p, w_q>| <= kJacobiTolerance |w_p| |w_q|.
inline constexpr double kJacobiTolerance = 1e-13;
inline constexpr int kMaxJacobiSweeps = 80;

/// Singular values in non-increasing order.
struct SingularSpectrum {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Thin singular value decomposition M = U diag(sigma) V^T of an m x n matrix.
/// U is m x r, V is n x r with r = min(m, n); sigma is non-increasing.
/// Columns of U belonging to zero singular values are zero.
struct Svd {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;
};

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Eigenvalues sorted by non-increasing modulus, ties by non-decreasing
/// argument. When vectors were requested, `vectors[i]` is a unit eigenvector
/// for `values[i]` if that eigenvalue is simple and empty otherwise.
struct EigenSpectrum {
  std::vector<Complex> values;
  std::vector<ComplexVector> vectors;

  std::size_t size() const noexcept { return values.size(); }
};

/// All singular values of a square matrix, by one-sided Jacobi sweeps.
SingularSpectrum singular_values(const Matrix& m);

/// Singular values of any matrix written to `out` (size min(rows, cols)),
/// without allocating on repeated calls from the same thread.
void singular_values_into(const Matrix& m, std::span<double> out);

Svd svd(const Matrix& m);

/// Largest singular value (Euclidean operator norm).
double operator_norm(const Matrix& m);

/// Eigenvalues (with algebraic multiplicity) of a square matrix of dimension
/// at most 8, by shifted QR on the balanced Hessenberg form.
EigenSpectrum eigen(const Matrix& m, bool want_vectors = false);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Matrix of k x k minors of `a` in the lexicographic basis of k-subsets.
Matrix exterior_power(const Matrix& a, std::size_t k);

double determinant(const Matrix& m);

/// Solve a x = b by partial-pivot LU; throws DomainError when `a` is singular.
Vector solve(const Matrix& a, std::span<const double> b);

/// Number of singular values above `rel_tol * sigma_1`.
std::size_t numerical_rank(const Matrix& m, double rel_tol = 1e-10);

/// Orthonormal basis (as columns) of the span of the columns of `m`, built by
/// Gram-Schmidt in column order, skipping columns that are dependent on the
/// previous ones up to `rel_tol`.
Matrix orthonormal_column_basis(const Matrix& m, double rel_tol = 1e-10);

/// Distance from `v` to the column span of the orthonormal basis `basis`.
double distance_to_span(const Matrix& basis, std::span<const double> v);

std::uint64_t binomial(std::size_t n, std::size_t k);

/// All k-subsets of {0, ..., d-1} as increasing index lists, lexicographic.
std::vector<std::vector<std::size_t>> k_subsets(std::size_t d, std::size_t k);

}  // namespace affdim
