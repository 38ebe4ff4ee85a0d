#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "affdim/error.hpp"
#include "affdim/gallery.hpp"
#include "affdim/linalg.hpp"
#include "affdim/pressure.hpp"
#include "oracles/frozen_values.hpp"
#include "support.hpp"

using namespace affdim;
using affdim::testing::random_matrix;

namespace {

MatrixTuple similitudes(std::size_t n, double r) {
  std::vector<Matrix> maps;
  for (std::size_t i = 0; i < n; ++i) maps.push_back(r * rotation(0.3 + 0.7 * static_cast<double>(i)));
  return MatrixTuple(std::move(maps));
}

MatrixTuple diag_copies(std::size_t n) { return MatrixTuple(std::vector<Matrix>(n, Matrix{{0.5, 0}, {0, 0.25}})); }

// Positive, hence irreducible, two-dimensional pair.
MatrixTuple positive_pair() { return MatrixTuple({Matrix{{0.4, 0.2}, {0.1, 0.3}}, Matrix{{0.3, 0.05}, {0.25, 0.35}}}); }

// Upper triangular pair sharing the invariant line span{e_1}.
MatrixTuple triangular_pair() { return MatrixTuple({Matrix{{0.5, 0.2}, {0, 0.3}}, Matrix{{0.4, -0.1}, {0, 0.45}}}); }

constexpr double kTol = 1e-4;

void expect_bracket_near(const DimensionBracket& b, double value, double slack) {
  EXPECT_LE(b.lower, b.upper);
  EXPECT_LE(b.upper - b.lower, b.tolerance);
  EXPECT_NEAR(b.upper, value, b.tolerance + slack) << b.label;
}

}  // namespace

TEST(Svf, EmptyProductAndDeterminant) {
  std::mt19937_64 rng(1);
  for (std::size_t d = 1; d <= 4; ++d) {
    const Matrix m = random_matrix(rng, d, d);
    EXPECT_DOUBLE_EQ(svf(m, 0.0), 1.0);
    EXPECT_NEAR(svf(m, static_cast<double>(d)), std::abs(determinant(m)), 1e-12);
  }
}

TEST(Svf, FractionalExponent) { EXPECT_NEAR(svf(Matrix{{0.5, 0}, {0, 0.25}}, 1.5), 0.25, 1e-15); }

TEST(Svf, DeterminantBranchBeyondDimension) {
  const Matrix m{{0.5, 0}, {0, 0.25}};
  EXPECT_NEAR(svf(m, 3.0), std::pow(0.125, 1.5), 1e-15);
  // Both branches agree at s = d.
  EXPECT_NEAR(svf(m, 2.0), svf(m, 2.0 + 1e-12), 1e-12);
}

TEST(Svf, RankDeficientIsZeroPastRank) {
  const Matrix m{{1, 0}, {0, 0}};
  EXPECT_DOUBLE_EQ(svf(m, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(svf(m, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(svf(m, 3.0), 0.0);
}

TEST(Svf, NegativeExponentIsDomainError) { EXPECT_THROW(svf(Matrix::identity(2), -0.1), DomainError); }

TEST(Svf, Submultiplicative) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + trial % 3;
    const Matrix a = random_matrix(rng, d, d), b = random_matrix(rng, d, d);
    for (double s : {0.5, 1.0, 1.5, 2.5}) {
      EXPECT_LE(svf(a * b, s), svf(a, s) * svf(b, s) * (1 + 1e-9)) << "s=" << s;
    }
  }
}

TEST(LogSumExp, StreamingAndMerge) {
  LogSumExp a, b, all;
  for (int i = 0; i < 50; ++i) {
    const double x = -700.0 - i;
    (i % 2 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  EXPECT_NEAR(a.value(), all.value(), 1e-12);
  EXPECT_NEAR(all.value(), -700.0 + std::log(1.0 / (1.0 - std::exp(-1.0))), 1e-9);
  LogSumExp empty;
  empty.add(-INFINITY);
  EXPECT_EQ(empty.value(), -INFINITY);
}

TEST(LevelPressure, TwoEqualScalarMaps) {
  const double r = 0.6;
  const MatrixTuple t(std::vector<Matrix>(2, Matrix{{r, 0}, {0, r}}));
  for (double s : {0.3, 1.0, 1.7}) {
    const auto e = level_pressure(t, s, 5);
    EXPECT_NEAR(e.value, std::log(2.0) + s * std::log(r), 1e-12);
    EXPECT_NEAR(e.envelope, e.value, 1e-12);
  }
}

TEST(LevelPressure, SimilitudesAreConstantInLevel) {
  const MatrixTuple t = similitudes(4, 1.0 / 3.0);
  for (double s : {0.5, 1.2, 1.9}) {
    const auto e = level_pressure(t, s, 7);
    for (double v : e.level_values) EXPECT_NEAR(v, std::log(4.0) + s * std::log(1.0 / 3.0), 1e-12);
  }
}

TEST(LevelPressure, RankOneProjectionOfRotations) {
  const double r = 0.5;
  const MatrixTuple t = similitudes(3, r);
  const Matrix q = line_projection(0.4);
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_NEAR(level_pressure(t, 0.7, n, q).value, std::log(3.0) + 0.7 * std::log(r), 1e-12);
    EXPECT_EQ(level_pressure(t, 1.3, n, q).value, -INFINITY);
  }
}

TEST(LevelPressure, EnvelopeIsMinimumAndMonotoneInLevel) {
  const MatrixTuple t = positive_pair();
  double previous = INFINITY;
  for (std::size_t n = 1; n <= 9; ++n) {
    const auto e = level_pressure(t, 1.3, n);
    EXPECT_LE(e.envelope, e.value);
    EXPECT_LE(e.envelope, previous);
    EXPECT_EQ(e.level_values.size(), n);
    previous = e.envelope;
  }
}

TEST(LevelPressure, StrictlyDecreasingInExponent) {
  const MatrixTuple t = positive_pair();
  double previous = INFINITY;
  for (double s = 0.0; s <= 2.5; s += 0.1) {
    const double v = level_pressure(t, s, 6).value;
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(LevelPressure, ShardCountDoesNotMatter) {
  std::mt19937_64 rng(3);
  std::vector<Matrix> maps;
  for (int i = 0; i < 3; ++i) maps.push_back(0.5 * random_matrix(rng, 3, 3));
  const MatrixTuple t(maps);
  const auto ref = level_pressure(t, 1.4, 7);
  for (std::size_t shards : {2u, 3u, 9u, 40u}) {
    const auto e = level_pressure(t, 1.4, 7, std::nullopt, PressureOptions{shards});
    EXPECT_NEAR(e.value, ref.value, 1e-12 * std::abs(ref.value));
  }
}

TEST(LevelPressure, ProfileMatchesStreaming) {
  const MatrixTuple t = positive_pair();
  const auto profile = PressureProfile::build(t, 8, std::nullopt, {});
  for (double s : {0.2, 1.0, 1.6, 2.0, 2.4}) {
    const auto a = profile.evaluate(s);
    const auto b = level_pressure(t, s, 8);
    for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(a.level_values[m], b.level_values[m], 1e-13);
  }
}

TEST(LevelPressure, TinySingularValuesKeepRelativeAccuracy) {
  // sigma_2 of long words of a strongly anisotropic pair falls far below
  // rounding of sigma_1; the level sum at s = 2 must still equal the exact
  // determinant sum.
  const MatrixTuple t({Matrix{{0.9, 0.3}, {0, 0.01}}, Matrix{{0.8, 0}, {0.2, 0.02}}});
  const std::size_t n = 12;
  const auto e = level_pressure(t, 2.0, n);
  const double exact = std::log(std::abs(determinant(t[0])) + std::abs(determinant(t[1])));
  EXPECT_NEAR(e.value, exact, 1e-12);
}

TEST(AffinityDimension, SimilitudesClosedForm) {
  for (std::size_t n : {1u, 3u, 6u}) {
    expect_bracket_near(affinity_dimension(similitudes(4, 1.0 / 3.0), n), oracle::kSimilarityDim, 1e-9);
  }
}

TEST(AffinityDimension, DiagonalClosedForms) {
  expect_bracket_near(affinity_dimension(diag_copies(3), 6), oracle::kDiagThreeDim, 1e-9);
  expect_bracket_near(affinity_dimension(diag_copies(2), 6), 1.0, 1e-9);
}

TEST(AffinityDimension, CertifiedUpperLabelAndStraddle) {
  const MatrixTuple t = positive_pair();
  const auto b = affinity_dimension(t, 7, kTol);
  EXPECT_TRUE(b.certified_upper);
  EXPECT_NE(b.label.find("upper bound"), std::string::npos);
  EXPECT_GT(level_pressure(t, b.lower, 7).envelope, 0.0);
  EXPECT_LE(level_pressure(t, b.upper, 7).envelope, 0.0);
  EXPECT_LE(b.iterations, 60);
}

TEST(AffinityDimension, Preconditions) {
  EXPECT_THROW(affinity_dimension(MatrixTuple({Matrix::identity(2), 0.5 * Matrix::identity(2)}), 3),
               PreconditionError);
  EXPECT_THROW(affinity_dimension(MatrixTuple(std::vector<Matrix>(30, 0.9 * Matrix::identity(2))), 3),
               PreconditionError);
  EXPECT_THROW(affinity_dimension(positive_pair(), 3, 1e-8), DomainError);
  EXPECT_THROW(affinity_dimension(similitudes(4, 0.3), 14), ResourceError);
}

TEST(AffinityDimension, StreamingPathAgreesWithCachedPath) {
  const MatrixTuple t = positive_pair();
  PressureOptions uncached;
  uncached.cache_limit = 0;
  const auto a = affinity_dimension(t, 6, kTol);
  const auto b = affinity_dimension(t, 6, kTol, uncached);
  EXPECT_NEAR(a.upper, b.upper, 1e-12);
}

TEST(AffinityDimension, TensorRegression) {
  const auto inst = build_theorem3(admissible_a(), admissible_b());
  expect_bracket_near(affinity_dimension(inst.tuple(), 8, kTol), oracle::kTensorDim8, 1e-6);
  expect_bracket_near(affinity_dimension(inst.base_a(), 8, kTol), oracle::kBaseDim8, 1e-6);
}

TEST(ProjectedExponent, IdentityMatchesAffinityDimension) {
  const MatrixTuple t = positive_pair();
  const auto p = projected_exponent(t, Matrix::identity(2), 7, kTol);
  EXPECT_LE(p.empirical.lower, p.unprojected.upper);
  EXPECT_LE(p.unprojected.lower, p.empirical.upper);
  EXPECT_FALSE(p.empirical.certified_upper);
  EXPECT_NE(p.empirical.label.find("empirical"), std::string::npos);
  EXPECT_EQ(p.projection_rank, 2u);
  EXPECT_DOUBLE_EQ(p.crude_bound, std::min(p.unprojected.upper, 2.0));
}

TEST(ProjectedExponent, SimilitudesWithOrthogonalProjectionAgree) {
  const MatrixTuple t = similitudes(4, 1.0 / 3.0);
  const auto p = projected_exponent(t, rotation(0.9), 5, kTol);
  EXPECT_NEAR(p.empirical.upper, p.unprojected.upper, 1e-9);
}

TEST(ProjectedExponent, SimilitudesWithGeneralProjectionConverge) {
  // For a full-rank Q the terms change by bounded factors only, so the level-n
  // zeros approach the affinity dimension as n grows.
  const MatrixTuple t = similitudes(4, 1.0 / 3.0);
  const Matrix q{{2.0, 0.5}, {0.1, 0.7}};
  double previous = INFINITY;
  for (std::size_t n : {2u, 4u, 8u}) {
    const double gap = std::abs(projected_exponent(t, q, n, kTol).empirical.upper - oracle::kSimilarityDim);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 0.1);
}

TEST(ProjectedExponent, ShearRotationSystemCollapsesToBaseTuple) {
  const auto deffy = build_deffy(1.0);
  const Matrix q = kronecker(Matrix::identity(2), Matrix{{1, 0}, {0, 0}});
  const auto p = projected_exponent(deffy.tuple(), q, 8, kTol);
  const auto base = affinity_dimension(deffy.base_a(), 8, kTol);
  EXPECT_NEAR(p.empirical.upper, base.upper, kTol);
  expect_bracket_near(p.empirical, oracle::kDeffyProjectedIP8, 1e-6);
  expect_bracket_near(p.unprojected, oracle::kDeffyUnprojected8, 1e-6);
  EXPECT_EQ(p.projection_rank, 2u);
  EXPECT_DOUBLE_EQ(p.crude_bound, 2.0);
}

TEST(Kappa, SimilitudesFullRank) {
  const double r = 0.4;
  const auto k = kappa_estimate(similitudes(3, r), Matrix::identity(2), 2, 20, 7);
  EXPECT_GE(k.kappa_hat, r - 1e-12);
  EXPECT_EQ(k.words, 3u);
  EXPECT_NE(k.semantics.find("not a certificate"), std::string::npos);
}

TEST(Kappa, PositiveForIrreduciblePairAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto k = kappa_estimate(positive_pair(), Matrix::identity(2), 1, 200, seed);
    EXPECT_GT(k.kappa_hat, 0.0);
    const Matrix& b = k.witness_projection;
    EXPECT_LT(max_abs_diff(b * b, b), 1e-10);
    EXPECT_LT(max_abs_diff(b.transpose(), b), 1e-10);
    EXPECT_EQ(numerical_rank(b), 1u);
  }
}

TEST(Kappa, ReducibleTupleMayApproachZero) {
  // Q kills e_1 and the pair preserves span{e_1}: samples near e_1 push the
  // estimate towards zero as the number of samples grows.
  const Matrix q{{0, 0}, {0, 1}};
  const double few = kappa_estimate(triangular_pair(), q, 1, 5, 3).kappa_hat;
  const double many = kappa_estimate(triangular_pair(), q, 1, 5000, 3).kappa_hat;
  EXPECT_LE(many, few);
  EXPECT_LT(many, 0.01);
}

TEST(Kappa, Preconditions) {
  EXPECT_THROW(kappa_estimate(positive_pair(), Matrix{{1, 0}, {0, 0}}, 2, 5, 1), DomainError);
  EXPECT_THROW(kappa_estimate(positive_pair(), Matrix::identity(2), 1, 0, 1), DomainError);
  EXPECT_THROW(kappa_estimate(positive_pair(), Matrix::identity(3), 1, 5, 1), ShapeError);
  EXPECT_THROW(kappa_estimate(positive_pair(), Matrix::identity(2), 1, 5, 1, 1), ResourceError);
}

TEST(Kappa, Reproducible) {
  const auto a = kappa_estimate(positive_pair(), Matrix::identity(2), 1, 50, 99);
  const auto b = kappa_estimate(positive_pair(), Matrix::identity(2), 1, 50, 99);
  EXPECT_EQ(a.kappa_hat, b.kappa_hat);
  EXPECT_EQ(a.witness_projection, b.witness_projection);
}

TEST(QuasiMult, FullRankRatioHasSingleLetterLowerBound) {
  const MatrixTuple t = positive_pair();
  for (double s : {0.5, 1.0, 2.0}) {
    const auto r = quasimult_check(t, Matrix::identity(2), 2, s, 300, 5);
    // phi^s(A_j A_i) >= sigma_2(A_j)^s phi^s(A_i) for every letter j.
    double bound = 0.0;
    for (const auto& m : t.maps()) bound = std::max(bound, std::pow(singular_values(m)[1], s));
    EXPECT_GE(r.min_ratio, bound * (1 - 1e-9)) << "s=" << s;
    EXPECT_TRUE(r.pass);
  }
}

TEST(QuasiMult, AgainstKappaEstimate) {
  const MatrixTuple t = positive_pair();
  const auto k = kappa_estimate(t, Matrix::identity(2), 1, 100, 2);
  for (double s : {0.5, 1.0}) {
    const auto r = quasimult_check(t, Matrix::identity(2), 1, s, 1000, 9, k.kappa_hat);
    EXPECT_GT(r.min_ratio, 0.0);
    EXPECT_DOUBLE_EQ(r.threshold, std::pow(k.kappa_hat, s));
    EXPECT_EQ(r.pass, r.violations == 0);
    EXPECT_EQ(r.trials, 1000u);
    EXPECT_GE(r.worst_word.length(), 1u);
    EXPECT_LE(r.worst_word.length(), 12u);
  }
}

TEST(QuasiMult, TensorSystemUnderExceptionalProjection) {
  const auto inst = build_theorem3(admissible_a(), admissible_b());
  const Matrix q = kronecker(Matrix::identity(2), line_projection(0.0));
  const auto r = quasimult_check(inst.tuple(), q, 2, 1.0, 200, 4);
  EXPECT_GT(r.min_ratio, 0.0);
}

TEST(QuasiMult, ReducibleTupleRatiosShrink) {
  const Matrix q{{0, 0}, {0, 1}};
  const auto r = quasimult_check(triangular_pair(), q, 1, 1.0, 500, 6);
  EXPECT_GE(r.min_ratio, 0.0);
  EXPECT_THROW(quasimult_check(triangular_pair(), q, 1, 1.5, 5, 6), DomainError);
}

TEST(KronBound, RotationSecondFactorGivesBaseDimension) {
  const MatrixTuple base_a = positive_pair();
  const MatrixTuple base_b({rotation(0.3), rotation(1.1)});
  const auto bound = kron_projected_bound(base_a, base_b, line_projection(0.2), 7, kTol);
  EXPECT_NEAR(bound.upper, affinity_dimension(base_a, 7, kTol).upper, 1e-12);
  EXPECT_TRUE(bound.certified_upper);
}

TEST(KronBound, TensorRegressionAndMargin) {
  const auto inst = build_theorem3(admissible_a(), admissible_b());
  const auto bound = kron_projected_bound(inst.base_a(), inst.base_b(), line_projection(0.0), 8, kTol);
  expect_bracket_near(bound, oracle::kTensorKronBound8, 1e-6);
  const auto full = affinity_dimension(inst.tuple(), 8, kTol);
  EXPECT_NEAR(full.upper - bound.upper, oracle::kTensorGap8, 2 * kTol + 1e-6);
  EXPECT_GT(full.upper - bound.upper, 0.0);
}

TEST(KronBound, MatchesShearRotationProjection) {
  const auto deffy = build_deffy(1.0);
  const auto bound = kron_projected_bound(deffy.base_a(), deffy.base_b(), line_projection(0.0), 8, kTol);
  const Matrix q = kronecker(Matrix::identity(2), line_projection(0.0));
  EXPECT_NEAR(bound.upper, projected_exponent(deffy.tuple(), q, 8, kTol).empirical.upper, kTol);
}

TEST(KronBound, Preconditions) {
  const auto inst = build_theorem3(admissible_a(), admissible_b());
  EXPECT_THROW(kron_projected_bound(inst.base_a(), inst.base_b(), Matrix::identity(2), 4), DomainError);
  EXPECT_THROW(kron_projected_bound(inst.base_a(), positive_pair(), line_projection(0.0), 4), ShapeError);
  const MatrixTuple big(std::vector<Matrix>(4, 3.0 * Matrix::identity(2)));
  EXPECT_THROW(kron_projected_bound(inst.base_a(), big, line_projection(0.0), 4), PreconditionError);
}

// Nonzero singular values of (I (x) P)(A (x) B) are sigma_i(A) sigma_1(P B).
TEST(KronBound, FactorisationIdentity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2);
    const Matrix p = line_projection(angle(rng));
    const auto sv = singular_values(kronecker(Matrix::identity(2), p) * kronecker(a, b)).values;
    const auto sa = singular_values(a).values;
    const double pb = operator_norm(p * b);
    EXPECT_NEAR(sv[0], sa[0] * pb, 1e-9);
    EXPECT_NEAR(sv[1], sa[1] * pb, 1e-9);
    EXPECT_NEAR(sv[2], 0.0, 1e-9);
    EXPECT_NEAR(sv[3], 0.0, 1e-9);
  }
}

TEST(IntegerBounds, ScalarCopies) {
  const double r = 0.3;
  const MatrixTuple t(std::vector<Matrix>(4, r * Matrix::identity(2)));
  EXPECT_NEAR(pressure_at_one_lower(t), std::log(4 * r), 1e-14);
  EXPECT_NEAR(pressure_at_two_upper(t), std::log(4 * r * r), 1e-14);
  EXPECT_LT(pressure_at_two_upper(t), 0.0);
}

TEST(IntegerBounds, AdmissiblePair) {
  const auto inst = build_theorem3(admissible_a(), admissible_b());
  const MatrixTuple base = inst.base_a();
  const double lower = pressure_at_one_lower(base);
  EXPECT_GE(lower, std::log(6.0 / 5.0));
  EXPECT_NEAR(lower, oracle::kPressureOneLower, 1e-12);
  EXPECT_NEAR(lower, std::log(4 * singular_values(admissible_a())[1]), 1e-12);
  const double upper = pressure_at_two_upper(base);
  EXPECT_LT(upper, std::log(4.0 / 9.0));
  EXPECT_NEAR(upper, std::log(4 * std::pow(operator_norm(admissible_a()), 2)), 1e-12);
  EXPECT_NEAR(upper, oracle::kPressureTwoUpper, 1e-12);
}

TEST(IntegerBounds, RequireTwoDimensions) {
  EXPECT_THROW(pressure_at_one_lower(MatrixTuple(std::vector<Matrix>(2, 0.5 * Matrix::identity(3)))), ShapeError);
  EXPECT_THROW(pressure_at_two_upper(MatrixTuple(std::vector<Matrix>(2, 0.5 * Matrix::identity(3)))), ShapeError);
}
