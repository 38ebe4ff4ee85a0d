#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"
#include "affdim/wordspace.hpp"

namespace affdim {

enum class Verdict { kCertified, kRefuted, kInconclusive };

const char* verdict_name(Verdict v) noexcept;

struct Quantity {
  std::string name;
  double value = 0.0;
};

/// One checked inequality. `relation` reads as "<value> <relation> <threshold>".
struct SubCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;
};

/// Evidence backing a verdict. Fields not relevant to the property stay empty.
struct Witness {
  std::optional<Word> word;
  /// Orthonormal basis (columns) of an invariant subspace.
  Matrix subspace;
  std::optional<Vector> center;
  std::optional<double> radius;
  std::vector<Quantity> quantities;

  bool empty() const noexcept {
    return !word && subspace.empty() && !center && !radius && quantities.empty();
  }
};

struct CertificateReport {
  std::string property;
  Verdict verdict = Verdict::kInconclusive;
  Witness witness;
  std::vector<Quantity> tolerances;
  std::vector<SubCheck> checks;
  std::string note;

  bool certified() const noexcept { return verdict == Verdict::kCertified; }
  /// First sub-check that did not pass, or nullptr.
  const SubCheck* first_failure() const noexcept;
};

/// |lambda_1| / |lambda_2| of the k-th exterior power of A_word (infinity when
/// that power is one-dimensional or the second eigenvalue vanishes).
double proximality_ratio(const MatrixTuple& tuple, const Word& word, std::size_t k);

/// Searches words of length 1..max_len, shortest first and lexicographically,
/// for a product whose k-th exterior power has a simple dominant eigenvalue
/// with modulus ratio at least 1 + margin. Exhaustion is INCONCLUSIVE.
CertificateReport proximality_check(const MatrixTuple& tuple, std::size_t k, std::size_t max_len,
                                    double margin = 1e-3, std::uint64_t budget = kDefaultWordBudget);

/// Real irreducibility of (A_1^{^k}, ..., A_N^{^k}) via the eigenvectors of a
/// random element of the generated algebra. Requires C(d,k) <= 8.
CertificateReport irreducibility_check(const MatrixTuple& tuple, std::size_t k, std::size_t retries = 8,
                                       std::uint64_t seed = 0x5EED);

/// Tensor criterion for strong irreducibility of (A (x) B, A^T (x) B^T) with
/// entrywise positive 2x2 factors.
CertificateReport tensor_strong_irreducibility_certificate(const Matrix& a, const Matrix& b);

/// Ball criterion for strong separation: the closed ball B(center, radius) is
/// mapped into itself by every T_i and the images are pairwise disjoint.
CertificateReport strong_separation_certificate(const AffineIFS& ifs, const Vector& center, double radius);

/// Admissibility of (A, B) for the tensor counterexample construction.
CertificateReport theorem3_constraints_check(const Matrix& a, const Matrix& b);

}  // namespace affdim
