#include "affdim/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "affdim/error.hpp"
#include "affdim/linalg.hpp"

namespace affdim {

namespace {

void require_2x2(const Matrix& m, const char* what) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw ShapeError(std::string(what) + ": expected a 2x2 matrix, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

Vector basis_vector(std::size_t d, std::size_t i) {
  Vector v(d, 0.0);
  v[i] = 1.0;
  return v;
}

MatrixTuple paired(const Matrix& m) { return MatrixTuple({m, m, m.transpose(), m.transpose()}); }

}  // namespace

MatrixTuple Theorem3Instance::base_a() const { return paired(a); }
MatrixTuple Theorem3Instance::base_b() const { return paired(b); }

Theorem3Instance build_theorem3(const Matrix& a, const Matrix& b, std::optional<std::vector<Vector>> translations) {
  require_2x2(a, "A");
  require_2x2(b, "B");
  const Matrix m1 = kronecker(a, b);
  const Matrix m3 = kronecker(a.transpose(), b.transpose());
  std::vector<Vector> v;
  if (translations) {
    v = std::move(*translations);
  } else {
    for (std::size_t i = 0; i < 4; ++i) v.push_back(basis_vector(4, i));
  }
  return Theorem3Instance{a, b, AffineIFS(MatrixTuple({m1, m1, m3, m3}), std::move(v))};
}

Matrix admissible_a() { return Matrix{{0.32, 0.01}, {0.005, 0.315}}; }
Matrix admissible_b() { return Matrix{{1.0, 0.012}, {0.004, 1.0}}; }

Matrix shear_matrix() { return Matrix{{1.0, 3.0}, {0.0, 1.0}}; }

Matrix rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Matrix{{c, -s}, {s, c}};
}

MatrixTuple DeffyInstance::base_a() const {
  const Matrix c = (1.0 / std::sqrt(14.0)) * shear_matrix();
  return MatrixTuple({c, c.transpose()});
}

MatrixTuple DeffyInstance::base_b() const {
  const Matrix r = rotation(theta);
  return MatrixTuple({r, r.transpose()});
}

DeffyInstance build_deffy(double theta, std::optional<Vector> v1, std::optional<Vector> v2) {
  if (!std::isfinite(theta)) throw DomainError("deffy: theta must be finite");
  const Matrix m1 = kronecker((1.0 / std::sqrt(14.0)) * shear_matrix(), rotation(theta));
  const Matrix m2 = m1.transpose();
  Vector t1 = v1.value_or(Vector(4, 0.0));
  Vector t2 = v2.value_or(Vector{1.0, 0.0, 1.0, 0.0});
  return DeffyInstance{theta, AffineIFS(MatrixTuple({m1, m2}), {std::move(t1), std::move(t2)}),
                       "strong irreducibility holds when theta is an irrational multiple of pi"};
}

Matrix line_projection(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Matrix{{c * c, c * s}, {c * s, s * s}};
}

Theorem3Report certify_theorem3(const Theorem3Instance& instance, const Theorem3Options& options) {
  Theorem3Report report;
  report.constraints = theorem3_constraints_check(instance.a, instance.b);
  if (!report.constraints.certified()) {
    std::string failed;
    for (const auto& c : report.constraints.checks) {
      if (c.passed) continue;
      if (!failed.empty()) failed += "; ";
      failed += c.name;
    }
    throw PreconditionError("constraints check failed: " + failed);
  }
  const auto fail = [&report](std::string what) { report.failures.push_back(std::move(what)); };

  report.tensor = tensor_strong_irreducibility_certificate(instance.a, instance.b);
  if (!report.tensor.certified()) fail("tensor strong irreducibility");

  const MatrixTuple& m = instance.tuple();
  for (std::size_t k = 1; k <= 3; ++k) {
    report.proximality.push_back(proximality_check(m, k, options.proximality_max_len));
    if (!report.proximality.back().certified()) fail("proximality k=" + std::to_string(k));
    report.irreducibility.push_back(irreducibility_check(m, k, 8, options.seed + k));
    if (k != 2 && !report.irreducibility.back().certified()) fail("irreducibility k=" + std::to_string(k));
  }

  report.separation = strong_separation_certificate(instance.ifs, Vector(4, 0.0), 1.5);
  if (!report.separation.certified()) fail("strong separation ball");

  report.dimaff = affinity_dimension(m, options.level, options.tol, options.pressure);

  const MatrixTuple base_a = instance.base_a();
  const MatrixTuple base_b = instance.base_b();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const Matrix id2 = Matrix::identity(2);
  for (std::size_t j = 0; j < options.angles; ++j) {
    ProjectionSweepEntry entry;
    entry.angle = std::numbers::pi * static_cast<double>(j) / static_cast<double>(options.angles);
    const Matrix p = line_projection(entry.angle);
    entry.bound = kron_projected_bound(base_a, base_b, p, options.level, options.tol, options.pressure);
    if (options.empirical_sweep) {
      entry.empirical = projected_exponent(m, kronecker(id2, p), options.level, options.tol, options.pressure).empirical;
    }
    lo = std::min(lo, entry.bound.upper);
    hi = std::max(hi, entry.bound.upper);
    report.sweep.push_back(std::move(entry));
  }
  report.sweep_spread = report.sweep.empty() ? 0.0 : hi - lo;
  if (report.sweep_spread > 1e-12) fail("projection sweep not uniform");

  report.pressure_one_lower = pressure_at_one_lower(base_a);
  report.pressure_one_threshold = std::log(6.0 / 5.0);
  if (!(report.pressure_one_lower >= report.pressure_one_threshold)) fail("pressure at s=1 lower bound");
  report.pressure_two_upper = pressure_at_two_upper(base_a);
  report.pressure_two_threshold = std::log(4.0 / 9.0);
  if (!(report.pressure_two_upper < report.pressure_two_threshold)) fail("pressure at s=2 upper bound");

  std::vector<Matrix> lifted;
  for (const auto& a : base_a.maps()) lifted.push_back(kronecker(a, id2));
  report.envelope_one = level_pressure(base_a, 1.0, options.level, std::nullopt, options.pressure).envelope;
  report.envelope_two =
      level_pressure(MatrixTuple(std::move(lifted)), 2.0, options.level, std::nullopt, options.pressure).envelope;
  if (!(report.envelope_one > 0.0)) fail("envelope at s=1 positive");
  if (!(report.envelope_two < 0.0)) fail("envelope at s=2 negative");

  report.gap_margin = report.sweep.empty() ? 0.0 : report.dimaff.upper - hi;
  report.gap_label =
      "empirical: level-" + std::to_string(options.level) +
      " envelope zero of the four-map tuple minus the certified projected bound; the first term is an upper "
      "estimate of the affinity dimension, not a lower bound";
  if (!(report.gap_margin > 0.0)) fail("dimension gap margin positive");

  report.all_pass = report.failures.empty();
  return report;
}

}  // namespace affdim
