#include "affdim/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "affdim/error.hpp"
#include "affdim/linalg.hpp"

namespace affdim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Computes the log singular values of Q A_w for a word w. When Q has full rank
// the smallest value is recovered from log|det| (tracked exactly along the
// word) rather than taken from the SVD, which loses relative accuracy on the
// small end for long products.
class WordSpectrum {
 public:
  WordSpectrum(const MatrixTuple& tuple, const std::optional<Matrix>& projection)
      : dim_(tuple.dimension()), projection_(projection) {
    for (const auto& m : tuple.maps()) map_log_det_.push_back(std::log(std::abs(determinant(m))));
    if (projection_) {
      if (projection_->rows() != dim_ || projection_->cols() != dim_) {
        throw ShapeError("projection must be " + std::to_string(dim_) + "x" + std::to_string(dim_));
      }
      rank_ = numerical_rank(*projection_);
      if (rank_ == 0) throw DomainError("projection is the zero matrix");
      if (rank_ == dim_) projection_log_det_ = std::log(std::abs(determinant(*projection_)));
    } else {
      rank_ = dim_;
    }
  }

  std::size_t rank() const noexcept { return rank_; }

  struct Scratch {
    Matrix product;
    std::vector<double> sv;
  };

  Scratch scratch() const { return Scratch{Matrix(dim_, dim_), std::vector<double>(dim_)}; }

  void compute(std::span<const std::uint32_t> word, const Matrix& product, std::span<double> out,
               Scratch& scratch) const {
    const Matrix* m = &product;
    if (projection_) {
      multiply_into(*projection_, product, scratch.product);
      m = &scratch.product;
    }
    singular_values_into(*m, scratch.sv);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = (i < rank_ && scratch.sv[i] > 0.0) ? std::log(scratch.sv[i]) : kNegInf;
    if (rank_ == dim_) {
      double log_det = projection_log_det_;
      for (auto sym : word) log_det += map_log_det_[sym];
      double rest = 0.0;
      for (std::size_t i = 0; i + 1 < dim_; ++i) rest += out[i];
      double last = log_det - rest;
      if (dim_ > 1) last = std::min(last, out[dim_ - 2]);
      out[dim_ - 1] = last;
    }
  }

 private:
  std::size_t dim_;
  std::optional<Matrix> projection_;
  std::vector<double> map_log_det_;
  double projection_log_det_ = 0.0;
  std::size_t rank_ = 0;
};

PressureEstimate finish_estimate(double s, const std::vector<LogSumExp>& per_level) {
  PressureEstimate est;
  est.s = s;
  est.level = per_level.size();
  est.envelope = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < per_level.size(); ++m) {
    const double v = per_level[m].value() / static_cast<double>(m + 1);
    est.level_values.push_back(v);
    est.envelope = std::min(est.envelope, v);
  }
  est.value = est.level_values.back();
  return est;
}

PressureEstimate stream_pressure(const MatrixTuple& tuple, double s, std::size_t n,
                                 const std::optional<Matrix>& projection, const PressureOptions& options) {
  const WordSpectrum spectrum(tuple, projection);
  const std::size_t shards = std::max<std::size_t>(options.shards, 1);
  const std::size_t d = tuple.dimension();
  std::vector<std::vector<LogSumExp>> acc(shards, std::vector<LogSumExp>(n));
  std::vector<WordSpectrum::Scratch> scratch;
  std::vector<std::vector<double>> logs(shards, std::vector<double>(d));
  for (std::size_t i = 0; i < shards; ++i) scratch.push_back(spectrum.scratch());
  walk_words(
      tuple.maps(), 1, n,
      [&](std::size_t shard, const WordProductVisit& visit) {
        spectrum.compute(visit.word, visit.product, logs[shard], scratch[shard]);
        acc[shard][visit.word.size() - 1].add(log_svf(logs[shard], s));
      },
      WalkOptions{shards, options.budget});
  std::vector<LogSumExp> merged(n);
  for (std::size_t shard = 0; shard < shards; ++shard)
    for (std::size_t m = 0; m < n; ++m) merged[m].merge(acc[shard][m]);
  return finish_estimate(s, merged);
}

void require_level(std::size_t n) {
  if (n < 1) throw DomainError("level must be at least 1");
}

void require_tolerance(double tol) {
  if (!(tol >= 1e-6)) throw DomainError("tolerance must be at least 1e-6, got " + std::to_string(tol));
}

template <class Envelope>
DimensionBracket bisect_envelope_zero(Envelope&& envelope, double upper_start, std::size_t n, double tol) {
  DimensionBracket b;
  b.level = n;
  b.tolerance = tol;
  b.lower = 0.0;
  b.upper = upper_start;
  while (b.upper - b.lower > tol && b.iterations < kMaxBisectionIterations) {
    const double mid = 0.5 * (b.lower + b.upper);
    if (envelope(mid) > 0.0)
      b.lower = mid;
    else
      b.upper = mid;
    ++b.iterations;
  }
  return b;
}

// Envelope evaluator that caches word spectra when they fit in memory.
class EnvelopeEvaluator {
 public:
  EnvelopeEvaluator(const MatrixTuple& tuple, std::size_t n, const std::optional<Matrix>& projection,
                    const PressureOptions& options)
      : tuple_(tuple), n_(n), projection_(projection), options_(options) {
    const std::uint64_t words = word_count(tuple.arity(), 1, n);
    check_word_budget(word_count(tuple.arity(), n, n), options.budget, "pressure level");
    if (words <= options.cache_limit / std::max<std::size_t>(tuple.dimension(), 1))
      profile_ = PressureProfile::build(tuple, n, projection, options);
  }

  double operator()(double s) const { return estimate(s).envelope; }

  PressureEstimate estimate(double s) const {
    if (profile_) return profile_->evaluate(s);
    return stream_pressure(tuple_, s, n_, projection_, options_);
  }

 private:
  const MatrixTuple& tuple_;
  std::size_t n_;
  std::optional<Matrix> projection_;
  PressureOptions options_;
  std::optional<PressureProfile> profile_;
};

}  // namespace

double log_svf(std::span<const double> log_sv, double s) {
  if (!(s >= 0.0)) throw DomainError("singular value function: s must be non-negative");
  const std::size_t d = log_sv.size();
  if (s <= static_cast<double>(d)) {
    const auto whole = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(whole);
    double acc = 0.0;
    for (std::size_t i = 0; i < whole; ++i) {
      if (log_sv[i] == kNegInf) return kNegInf;
      acc += log_sv[i];
    }
    if (frac > 0.0) {
      if (log_sv[whole] == kNegInf) return kNegInf;
      acc += frac * log_sv[whole];
    }
    return acc;
  }
  double total = 0.0;
  for (double x : log_sv) {
    if (x == kNegInf) return kNegInf;
    total += x;
  }
  return s / static_cast<double>(d) * total;
}

double svf(const Matrix& m, double s) {
  if (!(s >= 0.0)) throw DomainError("singular value function: s must be non-negative");
  const SingularSpectrum sv = singular_values(m);
  const std::size_t d = sv.size();
  if (s > static_cast<double>(d)) return std::pow(std::abs(determinant(m)), s / static_cast<double>(d));
  const double floor_value = static_cast<double>(d) * std::numeric_limits<double>::epsilon() * sv[0];
  std::vector<double> logs(d);
  for (std::size_t i = 0; i < d; ++i) logs[i] = sv[i] > floor_value ? std::log(sv[i]) : kNegInf;
  return std::exp(log_svf(logs, s));
}

void LogSumExp::add(double x) noexcept {
  if (x == kNegInf) return;
  if (x <= max_) {
    sum_ += std::exp(x - max_);
  } else {
    sum_ = sum_ * std::exp(max_ - x) + 1.0;
    max_ = x;
  }
}

void LogSumExp::merge(const LogSumExp& other) noexcept {
  if (other.max_ == kNegInf) return;
  if (max_ == kNegInf) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    sum_ += other.sum_ * std::exp(other.max_ - max_);
  } else {
    sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
    max_ = other.max_;
  }
}

double LogSumExp::value() const noexcept { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

PressureProfile PressureProfile::build(const MatrixTuple& tuple, std::size_t n,
                                       const std::optional<Matrix>& projection, const PressureOptions& options) {
  require_level(n);
  const WordSpectrum spectrum(tuple, projection);
  const std::size_t shards = std::max<std::size_t>(options.shards, 1);
  PressureProfile profile;
  profile.dim_ = tuple.dimension();
  profile.levels_.assign(n, std::vector<std::vector<double>>(shards));
  std::vector<WordSpectrum::Scratch> scratch;
  for (std::size_t i = 0; i < shards; ++i) scratch.push_back(spectrum.scratch());
  walk_words(
      tuple.maps(), 1, n,
      [&](std::size_t shard, const WordProductVisit& visit) {
        auto& bucket = profile.levels_[visit.word.size() - 1][shard];
        const std::size_t at = bucket.size();
        bucket.resize(at + profile.dim_);
        spectrum.compute(visit.word, visit.product, std::span<double>(bucket).subspan(at, profile.dim_),
                         scratch[shard]);
      },
      WalkOptions{shards, options.budget});
  return profile;
}

PressureEstimate PressureProfile::evaluate(double s) const {
  std::vector<LogSumExp> merged(levels_.size());
  for (std::size_t m = 0; m < levels_.size(); ++m) {
    for (const auto& bucket : levels_[m]) {
      LogSumExp shard_acc;
      for (std::size_t at = 0; at < bucket.size(); at += dim_)
        shard_acc.add(log_svf(std::span<const double>(bucket).subspan(at, dim_), s));
      merged[m].merge(shard_acc);
    }
  }
  return finish_estimate(s, merged);
}

PressureEstimate level_pressure(const MatrixTuple& tuple, double s, std::size_t n,
                                const std::optional<Matrix>& projection, const PressureOptions& options) {
  require_level(n);
  if (!(s >= 0.0)) throw DomainError("level_pressure: s must be non-negative");
  return stream_pressure(tuple, s, n, projection, options);
}

DimensionBracket affinity_dimension(const MatrixTuple& tuple, std::size_t n, double tol,
                                    const PressureOptions& options) {
  require_level(n);
  require_tolerance(tol);
  tuple.require_contracting();
  const EnvelopeEvaluator envelope(tuple, n, std::nullopt, options);
  const double d = static_cast<double>(tuple.dimension());
  const double at_top = envelope(d);
  if (at_top > 0.0) {
    throw PreconditionError("pressure envelope is positive at s = d (" + std::to_string(at_top) +
                            "); the affinity dimension exceeds the ambient dimension");
  }
  DimensionBracket b = bisect_envelope_zero(envelope, d, n, tol);
  b.certified_upper = true;
  b.label = "certified upper bound on the affinity dimension (zero of the level-" + std::to_string(n) +
            " pressure envelope)";
  return b;
}

ProjectedExponent projected_exponent(const MatrixTuple& tuple, const Matrix& projection, std::size_t n, double tol,
                                     const PressureOptions& options) {
  require_level(n);
  require_tolerance(tol);
  tuple.require_contracting();
  ProjectedExponent out;
  const EnvelopeEvaluator envelope(tuple, n, projection, options);
  out.projection_rank = numerical_rank(projection);
  out.empirical = bisect_envelope_zero(envelope, static_cast<double>(tuple.dimension()), n, tol);
  out.empirical.certified_upper = false;
  out.empirical.label = "empirical projected exponent (zero of the level-" + std::to_string(n) +
                        " envelope of the projected sums; limit behaviour not certified)";
  out.unprojected = affinity_dimension(tuple, n, tol, options);
  out.crude_bound = std::min(out.unprojected.upper, static_cast<double>(out.projection_rank));
  return out;
}

namespace {

std::vector<Matrix> projected_short_products(const MatrixTuple& tuple, const Matrix& projection, std::size_t max_len,
                                             std::uint64_t budget) {
  const std::uint64_t count = word_count(tuple.arity(), 1, max_len);
  check_word_budget(count, budget, "short word enumeration");
  std::vector<Matrix> out;
  out.reserve(count);
  walk_words(
      tuple.maps(), 1, max_len,
      [&](std::size_t, const WordProductVisit& visit) { out.push_back(projection * visit.product); },
      WalkOptions{1, budget});
  return out;
}

void require_projection_shape(const MatrixTuple& tuple, const Matrix& projection) {
  if (projection.rows() != tuple.dimension() || projection.cols() != tuple.dimension())
    throw ShapeError("projection must be " + std::to_string(tuple.dimension()) + "x" +
                     std::to_string(tuple.dimension()));
}

}  // namespace

KappaEstimate kappa_estimate(const MatrixTuple& tuple, const Matrix& projection, std::size_t k, std::size_t samples,
                             std::uint64_t seed, std::uint64_t budget) {
  require_projection_shape(tuple, projection);
  const std::size_t d = tuple.dimension();
  const std::size_t rank = numerical_rank(projection);
  if (k < 1 || k > rank) {
    throw DomainError("kappa_estimate: need 1 <= k <= rank Q = " + std::to_string(rank) + ", got k = " +
                      std::to_string(k));
  }
  if (samples < 1) throw DomainError("kappa_estimate: samples must be at least 1");
  const std::size_t max_len = static_cast<std::size_t>(binomial(d, k));
  const std::vector<Matrix> products = projected_short_products(tuple, projection, max_len, budget);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  KappaEstimate est;
  est.k = k;
  est.samples = samples;
  est.words = products.size();
  est.kappa_hat = std::numeric_limits<double>::infinity();
  est.semantics =
      "sampled minimum over random rank-k orthogonal projections B of max_{|w| <= C(d,k)} sigma_k(Q A_w B); "
      "an estimate that may exceed the true constant, not a certificate";

  Matrix frame(d, k), image(d, k);
  std::vector<double> sv(k);
  for (std::size_t sample = 0; sample < samples; ++sample) {
    Matrix basis;
    do {
      for (double& x : frame.data()) x = gauss(rng);
      basis = orthonormal_column_basis(frame);
    } while (basis.cols() != k);
    // sigma_k(Q A_w B) = sigma_k(Q A_w U) for B = U U^T with orthonormal U.
    double best = 0.0;
    for (const auto& qa : products) {
      multiply_into(qa, basis, image);
      singular_values_into(image, sv);
      best = std::max(best, sv[k - 1]);
    }
    if (best < est.kappa_hat) {
      est.kappa_hat = best;
      est.witness_projection = basis * basis.transpose();
    }
  }
  return est;
}

QuasiMultReport quasimult_check(const MatrixTuple& tuple, const Matrix& projection, std::size_t k, double s,
                                std::size_t trials, std::uint64_t seed, std::optional<double> kappa_hat,
                                std::uint64_t budget) {
  require_projection_shape(tuple, projection);
  const std::size_t d = tuple.dimension();
  if (k < 1 || k > d) throw DomainError("quasimult_check: k outside [1, d]");
  if (!(s > 0.0) || s > static_cast<double>(k)) throw DomainError("quasimult_check: s must lie in (0, k]");
  if (trials < 1) throw DomainError("quasimult_check: trials must be at least 1");
  const std::size_t max_len = static_cast<std::size_t>(binomial(d, k));
  const std::vector<Matrix> products = projected_short_products(tuple, projection, max_len, budget);

  const WordSpectrum plain(tuple, std::nullopt);
  auto scratch = plain.scratch();
  std::vector<double> logs(d), sv(d);
  Matrix combined(d, d);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length_dist(1, 12);
  std::uniform_int_distribution<std::uint32_t> symbol_dist(0, static_cast<std::uint32_t>(tuple.arity() - 1));

  QuasiMultReport report;
  report.k = k;
  report.s = s;
  report.trials = trials;
  report.kappa_hat = kappa_hat;
  report.threshold = kappa_hat ? std::pow(*kappa_hat, s) : 0.0;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::uint32_t> symbols(length_dist(rng));
    for (auto& sym : symbols) sym = symbol_dist(rng);
    const Matrix word_matrix = word_product(tuple.maps(), symbols);
    plain.compute(symbols, word_matrix, logs, scratch);
    const double log_base = log_svf(logs, s);

    double best = kNegInf;
    for (const auto& qa : products) {
      multiply_into(qa, word_matrix, combined);
      singular_values_into(combined, sv);
      for (std::size_t i = 0; i < d; ++i) logs[i] = sv[i] > 0.0 ? std::log(sv[i]) : kNegInf;
      best = std::max(best, log_svf(logs, s));
    }
    const double ratio = std::exp(best - log_base);
    if (kappa_hat && ratio < report.threshold) ++report.violations;
    if (ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.worst_word = Word(std::move(symbols));
    }
  }
  report.pass = kappa_hat ? report.min_ratio >= report.threshold : report.min_ratio > 0.0;
  return report;
}

DimensionBracket kron_projected_bound(const MatrixTuple& base_a, const MatrixTuple& base_b, const Matrix& p,
                                      std::size_t n, double tol, const PressureOptions& options) {
  if (base_a.dimension() != 2 || base_b.dimension() != 2) throw ShapeError("kron_projected_bound: factors must be 2x2");
  if (base_a.arity() != base_b.arity()) throw ShapeError("kron_projected_bound: factor tuples differ in arity");
  if (p.rows() != 2 || p.cols() != 2) throw ShapeError("kron_projected_bound: P must be 2x2");
  const std::size_t rank = numerical_rank(p);
  if (rank != 1) throw DomainError("kron_projected_bound: P must have rank one, got rank " + std::to_string(rank));
  double b_norm = 0.0;
  for (std::size_t i = 0; i < base_a.arity(); ++i) {
    const double nb = operator_norm(base_b[i]);
    b_norm = std::max(b_norm, nb);
    if (operator_norm(base_a[i]) * nb >= 1.0)
      throw PreconditionError("kron_projected_bound: Kronecker map " + std::to_string(i + 1) + " is not contracting");
  }
  const MatrixTuple scaled = base_a.scaled(b_norm);
  DimensionBracket b = affinity_dimension(scaled, n, tol, options);
  b.label = "certified upper bound on the projected exponent for Q = I (x) P (affinity dimension of the first factor "
            "scaled by ||B|| = " + std::to_string(b_norm) + ")";
  return b;
}

double pressure_at_one_lower(const MatrixTuple& tuple2d) {
  if (tuple2d.dimension() != 2) throw ShapeError("pressure_at_one_lower: tuple must be two-dimensional");
  double sum = 0.0;
  for (const auto& m : tuple2d.maps()) sum += std::abs(determinant(m)) / operator_norm(m);
  return std::log(sum);
}

double pressure_at_two_upper(const MatrixTuple& tuple2d) {
  if (tuple2d.dimension() != 2) throw ShapeError("pressure_at_two_upper: tuple must be two-dimensional");
  double sum = 0.0;
  for (const auto& m : tuple2d.maps()) {
    const double n = operator_norm(m);
    sum += n * n;
  }
  return std::log(sum);
}

}  // namespace affdim
