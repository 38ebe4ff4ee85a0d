#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"
#include "affdim/pressure.hpp"
#include "affdim/structure.hpp"

namespace affdim {

/// M_1 = M_2 = A (x) B and M_3 = M_4 = A^T (x) B^T acting on R^4.
struct Theorem3Instance {
  Matrix a;
  Matrix b;
  AffineIFS ifs;

  const MatrixTuple& tuple() const noexcept { return ifs.linear(); }
  /// (A, A, A^T, A^T).
  MatrixTuple base_a() const;
  /// (B, B, B^T, B^T).
  MatrixTuple base_b() const;
};

/// Builds the four-map system. Translations default to e_1, ..., e_4.
/// Admissibility is not enforced here; see theorem3_constraints_check.
Theorem3Instance build_theorem3(const Matrix& a, const Matrix& b,
                                std::optional<std::vector<Vector>> translations = std::nullopt);

/// A fixed admissible pair: ||A|| < 1/3, det A > 1/10, both factors positive
/// and non-symmetric, and B close enough to I for the eigenvalue ratio test.
Matrix admissible_a();
Matrix admissible_b();

/// C = [[1, 3], [0, 1]].
Matrix shear_matrix();
Matrix rotation(double theta);

/// M_1 = C (x) R_theta / sqrt(14) and M_2 = M_1^T.
struct DeffyInstance {
  double theta = 1.0;
  AffineIFS ifs;
  std::string note;

  const MatrixTuple& tuple() const noexcept { return ifs.linear(); }
  /// (C / sqrt 14, C^T / sqrt 14).
  MatrixTuple base_a() const;
  /// (R_theta, R_theta^T).
  MatrixTuple base_b() const;
};

DeffyInstance build_deffy(double theta = 1.0, std::optional<Vector> v1 = std::nullopt,
                          std::optional<Vector> v2 = std::nullopt);

/// Rank-one orthogonal projection onto the line at angle `angle`.
Matrix line_projection(double angle);

struct ProjectionSweepEntry {
  double angle = 0.0;
  /// Certified upper bound on the projected exponent for Q = I (x) P.
  DimensionBracket bound;
  /// Zero of the level-n envelope for Q = I (x) P (empirical).
  std::optional<DimensionBracket> empirical;
};

struct Theorem3Options {
  std::size_t level = 8;
  double tol = 1e-4;
  std::uint64_t seed = 0x5EED;
  std::size_t angles = 16;
  std::size_t proximality_max_len = 4;
  bool empirical_sweep = true;
  PressureOptions pressure;
};

struct Theorem3Report {
  CertificateReport constraints;
  CertificateReport tensor;
  std::vector<CertificateReport> proximality;      // k = 1, 2, 3
  /// k = 1, 2, 3. Only k = 1 and k = 3 enter all_pass: on the exterior square
  /// of R^2 (x) R^2 every A (x) B preserves the two three-dimensional summands,
  /// so k = 2 is expected to be refuted.
  std::vector<CertificateReport> irreducibility;
  CertificateReport separation;
  DimensionBracket dimaff;                         // of (M_1, ..., M_4)
  std::vector<ProjectionSweepEntry> sweep;
  /// Largest minus smallest sweep bound.
  double sweep_spread = 0.0;
  double pressure_one_lower = 0.0;
  double pressure_one_threshold = 0.0;             // log(6/5)
  double pressure_two_upper = 0.0;
  double pressure_two_threshold = 0.0;             // log(4/9)
  /// Level-n envelopes: (A, A, A^T, A^T) at s = 1 and its (x) I lift at s = 2.
  double envelope_one = 0.0;
  double envelope_two = 0.0;
  /// dimaff.upper minus the largest sweep bound, both at the same level.
  double gap_margin = 0.0;
  std::string gap_label;
  bool all_pass = false;
  std::vector<std::string> failures;
};

/// Runs every certificate and bound for an admissible instance. Throws
/// PreconditionError naming the failing sub-checks when the constraints check
/// does not pass.
Theorem3Report certify_theorem3(const Theorem3Instance& instance, const Theorem3Options& options = {});

}  // namespace affdim
