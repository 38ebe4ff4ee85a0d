#include "affdim/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "affdim/error.hpp"
#include "affdim/linalg.hpp"

namespace affdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvariantResidual = 1e-8;
// Residuals between this and kInvariantResidual are too close to call with
// the current algebra element; a fresh element is drawn instead.
constexpr double kAmbiguousResidual = 1e-5;
constexpr double kEigenGap = 1e-7;
constexpr double kCriterionTol = 1e-9;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

SubCheck check(std::string name, double value, std::string relation, double threshold) {
  bool ok = false;
  if (relation == "<") ok = value < threshold;
  else if (relation == "<=") ok = value <= threshold;
  else if (relation == ">") ok = value > threshold;
  else if (relation == ">=") ok = value >= threshold;
  return SubCheck{std::move(name), ok, value, threshold, std::move(relation)};
}

bool all_passed(const std::vector<SubCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.passed; });
}

void require_2x2(const Matrix& m, const char* what) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw ShapeError(std::string(what) + ": expected a 2x2 matrix, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

double min_entry(const Matrix& m) {
  const auto d = m.data();
  return *std::min_element(d.begin(), d.end());
}

double asymmetry(const Matrix& m) { return std::abs(m(0, 1) - m(1, 0)); }

std::vector<Matrix> exterior_generators(const MatrixTuple& tuple, std::size_t k) {
  std::vector<Matrix> out;
  out.reserve(tuple.arity());
  for (const auto& m : tuple.maps()) out.push_back(exterior_power(m, k));
  return out;
}

// sin of the angle between G b and span(W), maximised over generators and
// basis columns b of W.
double invariance_residual(const std::vector<Matrix>& generators, const Matrix& basis) {
  double worst = 0.0;
  for (std::size_t c = 0; c < basis.cols(); ++c) {
    const Vector b = basis.column(c);
    for (const auto& g : generators) {
      const Vector gb = g * b;
      const double n = norm2(gb);
      if (n == 0.0) continue;
      worst = std::max(worst, distance_to_span(basis, gb) / n);
    }
  }
  return worst;
}

// A random element of the unital algebra generated by `generators`: a
// Gaussian combination of every word of length <= max_len, each product
// normalised to unit Frobenius norm.
Matrix random_algebra_element(const std::vector<Matrix>& generators, std::size_t max_len, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t dim = generators.front().rows();
  Matrix x = gauss(rng) * Matrix::identity(dim);
  std::vector<Matrix> frontier{Matrix::identity(dim)};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Matrix> next;
    next.reserve(frontier.size() * generators.size());
    for (const auto& prefix : frontier) {
      for (const auto& g : generators) {
        Matrix p = prefix * g;
        const double n = p.frobenius_norm();
        if (n > 0.0) p *= 1.0 / n;
        Matrix term = p;
        term *= gauss(rng);
        x += term;
        next.push_back(std::move(p));
      }
    }
    frontier = std::move(next);
  }
  return x;
}

double min_eigen_gap(const std::vector<Complex>& values) {
  double scale = 0.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double gap = kInf;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) gap = std::min(gap, std::abs(values[i] - values[j]));
  return gap / scale;
}

// Groups eigenvalue indices into real singletons and conjugate pairs.
std::vector<std::vector<std::size_t>> conjugate_classes(const std::vector<Complex>& values) {
  const double scale = std::max(1e-300, std::abs(values.front()));
  std::vector<bool> used(values.size(), false);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(values[i].imag()) <= 1e-12 * scale) {
      classes.push_back({i});
      continue;
    }
    std::size_t best = values.size();
    double best_dist = kInf;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(values[j] - std::conj(values[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == values.size()) throw NumericalError("irreducibility: unpaired complex eigenvalue");
    used[best] = true;
    classes.push_back({i, best});
  }
  return classes;
}

}  // namespace

const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::kCertified:
      return "CERTIFIED";
    case Verdict::kRefuted:
      return "REFUTED";
    case Verdict::kInconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

const SubCheck* CertificateReport::first_failure() const noexcept {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

double proximality_ratio(const MatrixTuple& tuple, const Word& word, std::size_t k) {
  const Matrix wedge = exterior_power(word_product(tuple, word), k);
  if (wedge.rows() == 1) return kInf;
  const EigenSpectrum spec = eigen(wedge);
  const double second = std::abs(spec.values[1]);
  return second == 0.0 ? kInf : std::abs(spec.values[0]) / second;
}

CertificateReport proximality_check(const MatrixTuple& tuple, std::size_t k, std::size_t max_len, double margin,
                                    std::uint64_t budget) {
  const std::size_t d = tuple.dimension();
  if (k < 1 || k > d) throw DomainError("proximality: k must lie in [1, " + std::to_string(d) + "]");
  if (!(margin > 0.0)) throw DomainError("proximality: margin must be positive");
  if (max_len < 1) throw DomainError("proximality: max_len must be at least 1");
  check_word_budget(word_count(tuple.arity(), 1, max_len), budget, "proximality search");

  CertificateReport report;
  report.property = "proximal of order " + std::to_string(k);
  report.tolerances = {{"margin", margin}, {"max_len", static_cast<double>(max_len)}};

  double best_ratio = 0.0;
  std::uint64_t searched = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::uint32_t> digits(len, 0);
    while (true) {
      ++searched;
      const Word word(digits);
      const double ratio = proximality_ratio(tuple, word, k);
      best_ratio = std::max(best_ratio, ratio);
      if (ratio >= 1.0 + margin) {
        report.verdict = Verdict::kCertified;
        report.witness.word = word;
        report.witness.quantities = {{"modulus_ratio", ratio}};
        report.checks.push_back(check("leading/second eigenvalue modulus of word " + word.str(), ratio, ">=",
                                      1.0 + margin));
        return report;
      }
      std::size_t pos = len;
      while (pos > 0 && digits[pos - 1] + 1 == tuple.arity()) digits[--pos] = 0;
      if (pos == 0) break;
      ++digits[pos - 1];
    }
  }
  report.verdict = Verdict::kInconclusive;
  report.checks.push_back(check("best modulus ratio over searched words", best_ratio, ">=", 1.0 + margin));
  report.note = "no proximal product among " + std::to_string(searched) +
                " words; finite search cannot rule proximality out";
  return report;
}

CertificateReport irreducibility_check(const MatrixTuple& tuple, std::size_t k, std::size_t retries,
                                       std::uint64_t seed) {
  const std::size_t d = tuple.dimension();
  if (k < 1 || k > d) throw DomainError("irreducibility: k must lie in [1, " + std::to_string(d) + "]");
  const std::uint64_t dim = binomial(d, k);
  if (dim > 8) {
    throw ResourceError("irreducibility: exterior power dimension " + std::to_string(dim) +
                        " exceeds the supported maximum of 8");
  }

  CertificateReport report;
  report.property = std::to_string(k) + "-irreducible";
  report.tolerances = {{"invariance_residual", kInvariantResidual},
                       {"eigenvalue_gap", kEigenGap},
                       {"retries", static_cast<double>(retries)}};
  if (dim == 1) {
    report.verdict = Verdict::kCertified;
    report.note = "exterior power is one-dimensional";
    return report;
  }

  const std::vector<Matrix> generators = exterior_generators(tuple, k);
  check_word_budget(word_count(tuple.arity(), 1, dim), 1'000'000, "irreducibility algebra element");
  std::mt19937_64 rng(seed);
  std::size_t attempts = 0;
  while (attempts < retries) {
    ++attempts;
    const Matrix x = random_algebra_element(generators, dim, rng);
    const EigenSpectrum spec = eigen(x, true);
    const double gap = min_eigen_gap(spec.values);
    if (gap <= kEigenGap) continue;
    bool ambiguous = false;
    const auto classes = conjugate_classes(spec.values);
    const std::size_t subsets = std::size_t{1} << classes.size();
    for (std::size_t mask = 1; mask + 1 < subsets; ++mask) {
      std::size_t expected = 0;
      std::vector<Vector> columns;
      for (std::size_t c = 0; c < classes.size(); ++c) {
        if (!(mask >> c & 1)) continue;
        const auto& vec = spec.vectors[classes[c].front()];
        if (vec.empty()) throw NumericalError("irreducibility: missing eigenvector for a simple eigenvalue");
        Vector re(dim), im(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          re[i] = vec[i].real();
          im[i] = vec[i].imag();
        }
        columns.push_back(re);
        ++expected;
        if (classes[c].size() == 2) {
          columns.push_back(im);
          ++expected;
        }
      }
      Matrix raw(dim, columns.size());
      for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t i = 0; i < dim; ++i) raw(i, c) = columns[c][i];
      const Matrix basis = orthonormal_column_basis(raw, 1e-8);
      if (basis.cols() != expected) {
        ambiguous = true;
        continue;
      }
      const double residual = invariance_residual(generators, basis);
      if (residual < kInvariantResidual) {
        report.verdict = Verdict::kRefuted;
        report.witness.subspace = basis;
        report.witness.quantities = {{"invariance_residual", residual},
                                     {"subspace_dimension", static_cast<double>(basis.cols())}};
        report.checks.push_back(check("invariant subspace residual", residual, "<", kInvariantResidual));
        report.note = "common invariant subspace of dimension " + std::to_string(basis.cols()) +
                      " in the exterior power of dimension " + std::to_string(dim);
        return report;
      }
      if (residual < kAmbiguousResidual) ambiguous = true;
    }
    if (ambiguous) continue;
    report.verdict = Verdict::kCertified;
    report.witness.quantities = {{"attempt", static_cast<double>(attempts)},
                                 {"eigenvalue_gap", gap},
                                 {"candidate_subspaces", static_cast<double>(subsets - 2)}};
    report.checks.push_back(check("relative eigenvalue gap of algebra element", gap, ">", kEigenGap));
    report.note = "no candidate subspace among " + std::to_string(subsets - 2) + " is invariant";
    return report;
  }
  report.verdict = Verdict::kInconclusive;
  report.note = "no algebra element with separated eigenvalues and clear residuals after " +
                std::to_string(retries) + " attempts";
  return report;
}

CertificateReport tensor_strong_irreducibility_certificate(const Matrix& a, const Matrix& b) {
  require_2x2(a, "tensor certificate A");
  require_2x2(b, "tensor certificate B");
  if (min_entry(a) <= 0.0 || min_entry(b) <= 0.0) {
    throw PreconditionError("tensor certificate: A and B must be entrywise positive");
  }

  CertificateReport report;
  report.property = "strongly irreducible (tensor criterion)";
  report.tolerances = {{"threshold", kCriterionTol}};

  auto& checks = report.checks;
  checks.push_back(check("(a) A is not symmetric: |a12 - a21|", asymmetry(a), ">", kCriterionTol));
  checks.push_back(check("(a) B is not symmetric: |b12 - b21|", asymmetry(b), ">", kCriterionTol));

  const EigenSpectrum ea = eigen(a, true);
  const EigenSpectrum eb = eigen(b, true);
  const auto real_positive_gap = [](const EigenSpectrum& e) {
    if (std::abs(e.values[0].imag()) > kCriterionTol || std::abs(e.values[1].imag()) > kCriterionTol) return 0.0;
    if (e.values[1].real() <= 0.0) return 0.0;
    return e.values[0].real() - e.values[1].real();
  };
  checks.push_back(check("(b) A has distinct positive eigenvalues: lambda1 - lambda2", real_positive_gap(ea), ">",
                         kCriterionTol));
  checks.push_back(check("(b) B has distinct positive eigenvalues: mu1 - mu2", real_positive_gap(eb), ">",
                         kCriterionTol));

  const double ratio_a = std::abs(ea.values[0]) / std::abs(ea.values[1]);
  const double ratio_b = std::abs(eb.values[0]) / std::abs(eb.values[1]);
  checks.push_back(check("(c) lambda1/lambda2 - mu1/mu2", ratio_a - ratio_b, ">", kCriterionTol));

  const auto pairing = [](const EigenSpectrum& e) {
    if (e.vectors[0].empty() || e.vectors[1].empty()) return 0.0;
    Complex ip = 0.0;
    for (std::size_t i = 0; i < 2; ++i) ip += std::conj(e.vectors[0][i]) * e.vectors[1][i];
    return std::abs(ip);
  };
  checks.push_back(check("(d) |<u1, u2>| for eigenvectors of A", pairing(ea), ">", kCriterionTol));
  checks.push_back(check("(d) |<v1, v2>| for eigenvectors of B", pairing(eb), ">", kCriterionTol));

  report.witness.quantities = {{"lambda1", ea.values[0].real()},
                               {"lambda2", ea.values[1].real()},
                               {"mu1", eb.values[0].real()},
                               {"mu2", eb.values[1].real()}};
  if (all_passed(checks)) {
    report.verdict = Verdict::kCertified;
    report.note = "the four products lambda_i mu_j are distinct and no two tensor eigenvectors are orthogonal";
    return report;
  }

  report.verdict = Verdict::kRefuted;
  const SubCheck* fail = report.first_failure();
  report.witness.quantities.push_back({fail->name, fail->value});
  const bool a_symmetric = !checks[0].passed;
  const bool b_symmetric = !checks[1].passed;
  if (a_symmetric || b_symmetric) {
    // With B symmetric, both generators act on the second factor through B and
    // preserve R^2 (x) v for an eigenvector v of B (and symmetrically for A).
    // Closed-form eigenvector of the symmetric part; stays defined when the
    // two eigenvalues nearly coincide.
    const Matrix& sym = b_symmetric ? b : a;
    const double angle = 0.5 * std::atan2(sym(0, 1) + sym(1, 0), sym(0, 0) - sym(1, 1));
    const Vector v{std::cos(angle), std::sin(angle)};
    Matrix basis(4, 2);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t row = b_symmetric ? 2 * c + i : 2 * i + c;
        basis(row, c) = v[i];
      }
    }
    report.witness.subspace = basis;
    report.note = "property fails: a symmetric factor yields a common invariant plane of both generators";
  } else {
    report.note = "criterion fails at '" + fail->name + "'; strong irreducibility itself is not refuted";
  }
  return report;
}

CertificateReport strong_separation_certificate(const AffineIFS& ifs, const Vector& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("strong separation: radius must be positive");
  if (center.size() != ifs.dimension()) {
    throw ShapeError("strong separation: centre has length " + std::to_string(center.size()) + ", expected " +
                     std::to_string(ifs.dimension()));
  }
  CertificateReport report;
  report.property = "strong separation (ball criterion)";
  report.tolerances = {{"radius", radius}};

  const std::size_t n = ifs.arity();
  std::vector<Vector> images;
  std::vector<double> norms;
  for (std::size_t i = 0; i < n; ++i) {
    images.push_back(ifs.apply(i, center));
    norms.push_back(operator_norm(ifs.linear()[i]));
  }
  const auto dist = [](const Vector& x, const Vector& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  };
  double min_slack = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double reach = dist(images[i], center) + norms[i] * radius;
    report.checks.push_back(check("T" + std::to_string(i + 1) + " maps the ball into itself", reach, "<=", radius));
    min_slack = std::min(min_slack, radius - reach);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = dist(images[i], images[j]);
      const double need = (norms[i] + norms[j]) * radius;
      report.checks.push_back(check("images of T" + std::to_string(i + 1) + " and T" + std::to_string(j + 1) +
                                        " are disjoint: centre distance",
                                    gap, ">", need));
      min_slack = std::min(min_slack, gap - need);
    }
  }
  report.witness.center = center;
  report.witness.radius = radius;
  report.witness.quantities = {{"min_slack", min_slack}};
  if (all_passed(report.checks)) {
    report.verdict = Verdict::kCertified;
    report.note = "the closed ball is a compact set whose images are pairwise disjoint subsets of it";
  } else {
    report.verdict = Verdict::kInconclusive;
    report.note = "this ball fails at '" + report.first_failure()->name + "'; another set may still separate";
  }
  return report;
}

CertificateReport theorem3_constraints_check(const Matrix& a, const Matrix& b) {
  require_2x2(a, "constraints check A");
  require_2x2(b, "constraints check B");
  CertificateReport report;
  report.property = "admissible (A, B) pair";
  report.tolerances = {{"symmetry_threshold", kCriterionTol}};
  auto& checks = report.checks;

  const double norm_a = operator_norm(a);
  const double norm_b = operator_norm(b);
  checks.push_back(check("A entrywise positive: min entry", min_entry(a), ">", 0.0));
  checks.push_back(check("B entrywise positive: min entry", min_entry(b), ">", 0.0));
  checks.push_back(check("||A|| < 1/3", norm_a, "<", 1.0 / 3.0));
  checks.push_back(check("det A > 1/10", determinant(a), ">", 0.1));
  checks.push_back(check("A^T != A: |a12 - a21|", asymmetry(a), ">", kCriterionTol));
  checks.push_back(check("B^T != B: |b12 - b21|", asymmetry(b), ">", kCriterionTol));

  const EigenSpectrum ea = eigen(a);
  const EigenSpectrum eb = eigen(b);
  const auto ratio = [](const EigenSpectrum& e) {
    const double second = std::abs(e.values[1]);
    return second == 0.0 ? kInf : std::abs(e.values[0]) / second;
  };
  const double ra = ratio(ea);
  const double rb = ratio(eb);
  checks.push_back(check("eigenvalue ratios: lambda1/lambda2 - mu1/mu2", ra - rb, ">", 0.0));
  checks.push_back(check("contraction: ||A|| ||B||", norm_a * norm_b, "<", 1.0));

  report.witness.quantities = {{"norm_A", norm_a}, {"det_A", determinant(a)}, {"norm_B", norm_b},
                               {"lambda_ratio", ra}, {"mu_ratio", rb}};
  if (all_passed(checks)) {
    report.verdict = Verdict::kCertified;
  } else {
    report.verdict = Verdict::kRefuted;
    const SubCheck* fail = report.first_failure();
    report.witness.quantities.push_back({fail->name, fail->value});
    report.note = "fails at '" + fail->name + "' (value " + fmt(fail->value) + ")";
  }
  return report;
}

}  // namespace affdim
