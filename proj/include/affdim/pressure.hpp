#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"
#include "affdim/wordspace.hpp"

namespace affdim {

inline constexpr int kMaxBisectionIterations = 60;

/// Singular value function: sigma_1 ... sigma_floor(s) * sigma_ceil(s)^(s - floor(s))
/// for 0 <= s <= d and |det M|^(s/d) beyond. Zero when s exceeds the rank.
double svf(const Matrix& m, double s);

/// log of the singular value function given log singular values in
/// non-increasing order (entries may be -infinity for zero values).
double log_svf(std::span<const double> log_singular_values, double s);

/// Streaming log-sum-exp with a running maximum.
class LogSumExp {
 public:
  void add(double x) noexcept;
  void merge(const LogSumExp& other) noexcept;
  /// log of the accumulated sum; -infinity when every term was zero.
  double value() const noexcept;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

struct PressureOptions {
  std::size_t shards = 1;
  std::uint64_t budget = kDefaultWordBudget;
  /// Above this many cached log singular values, bisection re-walks the word
  /// tree for each trial exponent instead of caching spectra.
  std::uint64_t cache_limit = std::uint64_t{1} << 25;
};

/// a_n(s)/n with a_n(s) = log sum_{|w| = n} phi^s(Q A_w) (Q = I when absent).
struct PressureEstimate {
  double s = 0.0;
  std::size_t level = 0;
  double value = 0.0;
  /// min over m <= n of a_m(s)/m.
  double envelope = 0.0;
  /// a_m(s)/m for m = 1 .. n.
  std::vector<double> level_values;
};

struct DimensionBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t level = 0;
  double tolerance = 0.0;
  int iterations = 0;
  /// True when `upper` is a certified upper bound of the limit quantity.
  bool certified_upper = false;
  std::string label;

  double midpoint() const noexcept { return 0.5 * (lower + upper); }
};

/// Log singular values of every word of length 1..n, grouped by level and
/// shard, so the envelope can be re-evaluated at many exponents.
class PressureProfile {
 public:
  static PressureProfile build(const MatrixTuple& tuple, std::size_t n, const std::optional<Matrix>& projection,
                               const PressureOptions& options);

  PressureEstimate evaluate(double s) const;
  std::size_t level() const noexcept { return levels_.size(); }
  std::size_t dimension() const noexcept { return dim_; }

 private:
  std::size_t dim_ = 0;
  // levels_[m - 1][shard] holds dim_ log singular values per word.
  std::vector<std::vector<std::vector<double>>> levels_;
};

PressureEstimate level_pressure(const MatrixTuple& tuple, double s, std::size_t n,
                                const std::optional<Matrix>& projection = std::nullopt,
                                const PressureOptions& options = {});

/// Bisection on [0, d] for the zero of the level-n envelope. The zero is an
/// upper bound for the affinity dimension because every a_m/m dominates the
/// limit pressure.
DimensionBracket affinity_dimension(const MatrixTuple& tuple, std::size_t n, double tol = 1e-4,
                                    const PressureOptions& options = {});

struct ProjectedExponent {
  /// Zero of the Q-premultiplied envelope; an empirical exponent, not a bound.
  DimensionBracket empirical;
  DimensionBracket unprojected;
  /// min(unprojected.upper, rank Q).
  double crude_bound = 0.0;
  std::size_t projection_rank = 0;
};

ProjectedExponent projected_exponent(const MatrixTuple& tuple, const Matrix& projection, std::size_t n,
                                     double tol = 1e-4, const PressureOptions& options = {});

/// Sampled minimum over random rank-k orthogonal projections B of
/// max_{1 <= |w| <= C(d,k)} sigma_k(Q A_w B). Sampling only visits finitely
/// many B, so the value can sit above the true minimum: it estimates the
/// positive constant, it does not certify it.
struct KappaEstimate {
  std::size_t k = 0;
  std::size_t samples = 0;
  double kappa_hat = 0.0;
  Matrix witness_projection;
  std::uint64_t words = 0;
  std::string semantics;
};

KappaEstimate kappa_estimate(const MatrixTuple& tuple, const Matrix& projection, std::size_t k,
                             std::size_t samples, std::uint64_t seed, std::uint64_t budget = 1'000'000);

struct QuasiMultReport {
  std::size_t k = 0;
  double s = 0.0;
  std::size_t trials = 0;
  /// min over sampled words i of max_{|w| <= C(d,k)} phi^s(Q A_w A_i) / phi^s(A_i).
  double min_ratio = 0.0;
  Word worst_word;
  std::optional<double> kappa_hat;
  /// kappa_hat^s when a kappa estimate was supplied, otherwise 0.
  double threshold = 0.0;
  std::size_t violations = 0;
  bool pass = false;
};

QuasiMultReport quasimult_check(const MatrixTuple& tuple, const Matrix& projection, std::size_t k, double s,
                                std::size_t trials, std::uint64_t seed,
                                std::optional<double> kappa_hat = std::nullopt, std::uint64_t budget = 1'000'000);

/// Upper bound on the projected exponent for Q = I (x) P with M_i = A_i (x) B_i
/// and rank-one P: the affinity dimension of (||B|| A_1, ..., ||B|| A_N),
/// ||B|| = max_i ||B_i||.
DimensionBracket kron_projected_bound(const MatrixTuple& base_a, const MatrixTuple& base_b, const Matrix& p,
                                      std::size_t n, double tol = 1e-4, const PressureOptions& options = {});

/// log sum_i sigma_2(A_i): a lower bound for the pressure at s = 1 of a
/// two-dimensional tuple (sigma_2 is supermultiplicative in dimension two).
double pressure_at_one_lower(const MatrixTuple& tuple2d);

/// log sum_i sigma_1(A_i)^2: an upper bound for the pressure at s = 2 of
/// (A_1 (x) I, ..., A_N (x) I).
double pressure_at_two_upper(const MatrixTuple& tuple2d);

}  // namespace affdim
