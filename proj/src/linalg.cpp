#include "affdim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "affdim/error.hpp"

namespace affdim {

namespace {


void require_square(const Matrix& m, const char* what) {
  if (!m.is_square() || m.rows() == 0) {
    throw ShapeError(std::string(what) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) throw DomainError(std::string(what) + ": non-finite entry");
}

// One-sided Jacobi on a column-major rows x cols buffer (rows >= cols).
// Rotations are accumulated into `v` (cols x cols, column-major) when given.
void jacobi_orthogonalise(double* w, std::size_t rows, std::size_t cols, double* v) {
  // Columns at rounding level relative to the whole matrix are left alone:
  // their direction is noise, and rotating them never meets the tolerance.
  double frob = 0.0;
  for (std::size_t i = 0; i < rows * cols; ++i) frob += w[i] * w[i];
  const double eps2 = std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon();
  const double noise_floor = eps2 * frob;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double* wp = w + p * rows;
        double* wq = w + q * rows;
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
        if (std::min(alpha, beta) <= noise_floor) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double a = wp[i], b = wq[i];
          wp[i] = c * a - s * b;
          wq[i] = s * a + c * b;
        }
        if (v != nullptr) {
          double* vp = v + p * cols;
          double* vq = v + q * cols;
          for (std::size_t i = 0; i < cols; ++i) {
            const double a = vp[i], b = vq[i];
            vp[i] = c * a - s * b;
            vq[i] = s * a + c * b;
          }
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("svd: Jacobi sweeps did not converge after " +
                       std::to_string(kMaxJacobiSweeps) + " sweeps");
}

// Column-major copy of m (or of m^T when transpose is set).
void load_column_major(const Matrix& m, bool transpose, std::vector<double>& out) {
  const std::size_t rows = transpose ? m.cols() : m.rows();
  const std::size_t cols = transpose ? m.rows() : m.cols();
  out.resize(rows * cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) out[c * rows + r] = transpose ? m(c, r) : m(r, c);
}

// Sorts by modulus descending; runs of (relatively) equal modulus by argument ascending.
std::vector<std::size_t> spectrum_order(const std::vector<Complex>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  double scale = 0.0;
  for (const auto& z : values) scale = std::max(scale, std::abs(z));
  const double tie = 1e-12 * scale;
  std::size_t start = 0;
  while (start < idx.size()) {
    std::size_t end = start + 1;
    while (end < idx.size() &&
           std::abs(values[idx[start]]) - std::abs(values[idx[end]]) <= tie)
      ++end;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       return std::arg(values[a]) < std::arg(values[b]);
                     });
    start = end;
  }
  return idx;
}

// 1-based dense storage for the Hessenberg/QR routines below.
class Work {
 public:
  explicit Work(std::size_t n) : n_(n), a_((n + 1) * (n + 1), 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

void balance(Work& a, std::size_t n) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 1; j <= n; ++j) a(i, j) *= g;
        for (std::size_t j = 1; j <= n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilised elementary similarities.
void to_hessenberg(Work& a, std::size_t n) {
  for (std::size_t m = 2; m < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j <= n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j <= n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 1; j <= n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = a(i, m - 1);
        if (y != 0.0) {
          y /= x;
          a(i, m - 1) = y;
          for (std::size_t j = m; j <= n; ++j) a(i, j) -= y * a(m, j);
          for (std::size_t j = 1; j <= n; ++j) a(j, m) += y * a(j, i);
        }
      }
    }
  }
  for (std::size_t i = 3; i <= n; ++i)
    for (std::size_t j = 1; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues in wr/wi (1-based).
void hessenberg_qr(Work& a, std::size_t n, std::vector<double>& wr, std::vector<double>& wi) {
  const int max_total = 100 * static_cast<int>(n);
  int total = 0;
  double anorm = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = std::max<std::size_t>(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
  long nn = static_cast<long>(n);
  double t = 0.0;
  auto A = [&](long i, long j) -> double& {
    return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  while (nn >= 1) {
    int its = 0;
    long l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 1) l = 1;
      double x = A(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (total >= max_total) {
            throw NumericalError("eigen: shifted QR did not converge within " +
                                 std::to_string(max_total) + " iterations (unreduced block of size " +
                                 std::to_string(nn - l + 1) + ")");
          }
          if (its == 10 || its == 20) {
            t += x;
            for (long i = 1; i <= nn; ++i) A(i, i) -= x;
            const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total;
          long m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (long i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (long k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
              } else {
                A(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (long j = k; j <= nn; ++j) {
                p = A(k, j) + q * A(k + 1, j);
                if (k != nn - 1) {
                  p += r * A(k + 2, j);
                  A(k + 2, j) -= p * z;
                }
                A(k + 1, j) -= p * y;
                A(k, j) -= p * x;
              }
              const long mmin = nn < k + 3 ? nn : k + 3;
              for (long i = l; i <= mmin; ++i) {
                p = x * A(i, k) + y * A(i, k + 1);
                if (k != nn - 1) {
                  p += z * A(i, k + 2);
                  A(i, k + 2) -= p * r;
                }
                A(i, k + 1) -= p * q;
                A(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

// Complex LU solve with partial pivoting; tiny pivots are nudged so that
// inverse iteration on a nearly singular shift still produces a direction.
ComplexVector complex_solve(std::vector<Complex> a, std::size_t n, ComplexVector b, double floor) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    if (std::abs(a[k * n + k]) < floor) a[k * n + k] = floor;
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a[i * n + k] / a[k * n + k];
      if (f == Complex{}) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * b[j];
    b[i] = s / a[i * n + i];
  }
  return b;
}

ComplexVector eigenvector_by_inverse_iteration(const Matrix& m, Complex lambda) {
  const std::size_t n = m.rows();
  const double scale = std::max(m.frobenius_norm(), std::abs(lambda));
  const double floor = std::max(scale, 1e-300) * 1e-14;
  std::vector<Complex> shifted(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) shifted[i * n + j] = Complex(m(i, j)) - (i == j ? lambda : Complex{});
  ComplexVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = Complex(1.0 + 0.1 * static_cast<double>(i), 0.0);
  for (int it = 0; it < 3; ++it) {
    x = complex_solve(shifted, n, x, floor);
    double nrm = 0.0;
    for (const auto& z : x) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (auto& z : x) z /= nrm;
  }
  // Fix the phase: largest component real and positive.
  std::size_t big = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[big]) * (1.0 + 1e-12)) big = i;
  const Complex phase = std::conj(x[big]) / std::abs(x[big]);
  for (auto& z : x) z *= phase;
  if (lambda.imag() == 0.0)
    for (auto& z : x) z = Complex(z.real(), 0.0);
  double nrm = 0.0;
  for (const auto& z : x) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  for (auto& z : x) z /= nrm;
  return x;
}

double lu_determinant(std::vector<double> a, std::size_t n) {
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (a[piv * n + k] == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      det = -det;
    }
    det *= a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return det;
}

// Laplace expansion along the first row of the minor a[rows, cols].
double minor_cofactor(const Matrix& a, std::span<const std::size_t> rows, std::vector<std::size_t>& cols) {
  const std::size_t k = rows.size();
  if (k == 1) return a(rows[0], cols[0]);
  if (k == 2) return a(rows[0], cols[0]) * a(rows[1], cols[1]) - a(rows[0], cols[1]) * a(rows[1], cols[0]);
  double sum = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t col = cols[j];
    const double entry = a(rows[0], col);
    if (entry != 0.0) {
      cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
      sum += sign * entry * minor_cofactor(a, rows.subspan(1), cols);
      cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(j), col);
    }
    sign = -sign;
  }
  return sum;
}

double minor(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  const std::size_t k = rows.size();
  if (k <= 4) {
    std::vector<std::size_t> c = cols;
    return minor_cofactor(a, rows, c);
  }
  std::vector<double> sub(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) sub[i * k + j] = a(rows[i], cols[j]);
  return lu_determinant(std::move(sub), k);
}

}  // namespace

SingularSpectrum singular_values(const Matrix& m) {
  require_square(m, "singular_values");
  require_finite(m, "singular_values");
  SingularSpectrum out;
  out.values.resize(m.rows());
  singular_values_into(m, out.values);
  return out;
}

void singular_values_into(const Matrix& m, std::span<double> out) {
  thread_local std::vector<double> work;
  const bool transpose = m.rows() < m.cols();
  const std::size_t rows = transpose ? m.cols() : m.rows();
  const std::size_t cols = transpose ? m.rows() : m.cols();
  if (out.size() != cols) throw ShapeError("singular_values_into: output size mismatch");
  load_column_major(m, transpose, work);
  jacobi_orthogonalise(work.data(), rows, cols, nullptr);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += work[j * rows + i] * work[j * rows + i];
    out[j] = std::sqrt(s);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
}

Svd svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.rows() == 0 || m.cols() == 0) throw ShapeError("svd: empty matrix");
  const bool transpose = m.rows() < m.cols();
  const std::size_t rows = transpose ? m.cols() : m.rows();
  const std::size_t cols = transpose ? m.rows() : m.cols();
  std::vector<double> w;
  load_column_major(m, transpose, w);
  std::vector<double> v(cols * cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i) v[i * cols + i] = 1.0;
  jacobi_orthogonalise(w.data(), rows, cols, v.data());

  std::vector<double> norms(cols);
  for (std::size_t j = 0; j < cols; ++j) norms[j] = norm2(std::span<const double>(w).subspan(j * rows, rows));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  Matrix left(rows, cols), right(cols, cols);
  std::vector<double> sigma(cols);
  for (std::size_t jj = 0; jj < cols; ++jj) {
    const std::size_t j = order[jj];
    sigma[jj] = norms[j];
    for (std::size_t i = 0; i < rows; ++i) left(i, jj) = norms[j] > 0.0 ? w[j * rows + i] / norms[j] : 0.0;
    for (std::size_t i = 0; i < cols; ++i) right(i, jj) = v[j * cols + i];
  }
  if (transpose) return Svd{std::move(right), std::move(sigma), std::move(left)};
  return Svd{std::move(left), std::move(sigma), std::move(right)};
}

double operator_norm(const Matrix& m) {
  std::vector<double> s(std::min(m.rows(), m.cols()));
  singular_values_into(m, s);
  return s.empty() ? 0.0 : s.front();
}

EigenSpectrum eigen(const Matrix& m, bool want_vectors) {
  require_square(m, "eigen");
  require_finite(m, "eigen");
  const std::size_t n = m.rows();
  if (n > 8) throw ShapeError("eigen: dimension " + std::to_string(n) + " exceeds 8");

  std::vector<Complex> raw(n);
  if (n == 1) {
    raw[0] = Complex(m(0, 0), 0.0);
  } else {
    Work a(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i + 1, j + 1) = m(i, j);
    balance(a, n);
    to_hessenberg(a, n);
    std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
    hessenberg_qr(a, n, wr, wi);
    for (std::size_t i = 0; i < n; ++i) raw[i] = Complex(wr[i + 1], wi[i + 1]);
  }

  EigenSpectrum out;
  for (std::size_t i : spectrum_order(raw)) out.values.push_back(raw[i]);
  if (!want_vectors) return out;

  double rho = 0.0;
  for (const auto& z : out.values) rho = std::max(rho, std::abs(z));
  const double separation = 1e-9 * std::max(rho, 1e-300);
  out.vectors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool simple = true;
    for (std::size_t j = 0; j < n && simple; ++j)
      if (j != i && std::abs(out.values[i] - out.values[j]) <= separation) simple = false;
    if (simple) out.vectors[i] = eigenvector_by_inverse_iteration(m, out.values[i]);
  }
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

Matrix exterior_power(const Matrix& a, std::size_t k) {
  require_square(a, "exterior_power");
  const std::size_t d = a.rows();
  if (k < 1 || k > d) {
    throw DomainError("exterior_power: k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }
  const auto subsets = k_subsets(d, k);
  Matrix out(subsets.size(), subsets.size());
  for (std::size_t r = 0; r < subsets.size(); ++r)
    for (std::size_t c = 0; c < subsets.size(); ++c) out(r, c) = minor(a, subsets[r], subsets[c]);
  return out;
}

double determinant(const Matrix& m) {
  require_square(m, "determinant");
  return lu_determinant(std::vector<double>(m.data().begin(), m.data().end()), m.rows());
}

Vector solve(const Matrix& a, std::span<const double> b) {
  require_square(a, "solve");
  const std::size_t n = a.rows();
  if (b.size() != n) throw ShapeError("solve: right-hand side size mismatch");
  std::vector<double> lu(a.data().begin(), a.data().end());
  Vector x(b.begin(), b.end());
  const double scale = a.max_abs();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu[i * n + k]) > std::abs(lu[piv * n + k])) piv = i;
    if (std::abs(lu[piv * n + k]) <= 1e-14 * scale) throw DomainError("solve: matrix is singular");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu[i * n + k] / lu[k * n + k];
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= f * lu[k * n + j];
      x[i] -= f * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu[i * n + j] * x[j];
    x[i] = s / lu[i * n + i];
  }
  return x;
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  std::vector<double> s(std::min(m.rows(), m.cols()));
  singular_values_into(m, s);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [&](double x) { return x > rel_tol * s.front(); }));
}

Matrix orthonormal_column_basis(const Matrix& m, double rel_tol) {
  double scale = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) scale = std::max(scale, norm2(m.column(c)));
  std::vector<Vector> basis;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    Vector v = m.column(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double proj = dot(b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
      }
    }
    const double nrm = norm2(v);
    if (nrm <= rel_tol * scale || nrm == 0.0) continue;
    for (double& x : v) x /= nrm;
    basis.push_back(std::move(v));
  }
  Matrix out(m.rows(), basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = basis[c][r];
  return out;
}

double distance_to_span(const Matrix& basis, std::span<const double> v) {
  Vector r(v.begin(), v.end());
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < basis.cols(); ++c) {
      const Vector b = basis.column(c);
      const double proj = dot(b, r);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= proj * b[i];
    }
  }
  return norm2(r);
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t d, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > d) return out;
  std::vector<std::size_t> cur(k);
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == d - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace affdim
