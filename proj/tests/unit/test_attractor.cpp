#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "affdim/attractor.hpp"
#include "affdim/error.hpp"
#include "affdim/gallery.hpp"
#include "affdim/linalg.hpp"
#include "oracles/frozen_values.hpp"
#include "support.hpp"

using namespace affdim;
namespace fs = std::filesystem;

namespace {

AffineIFS sierpinski() {
  const Matrix h{{0.5, 0.0}, {0.0, 0.5}};
  return AffineIFS(MatrixTuple({h, h, h}), {Vector{0.0, 0.0}, Vector{0.5, 0.0}, Vector{0.25, 0.5}});
}

AffineIFS full_square() {
  const Matrix h{{0.5, 0.0}, {0.0, 0.5}};
  return AffineIFS(MatrixTuple({h, h, h, h}),
                   {Vector{0.0, 0.0}, Vector{0.5, 0.0}, Vector{0.0, 0.5}, Vector{0.5, 0.5}});
}

AffineIFS cantor() {
  const Matrix t{{1.0 / 3.0}};
  return AffineIFS(MatrixTuple({t, t}), {Vector{0.0}, Vector{2.0 / 3.0}});
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Brute-force Hausdorff distance between two small clouds.
double hausdorff(const PointCloud& x, const PointCloud& y) {
  const auto directed = [](const PointCloud& a, const PointCloud& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < b.size(); ++j) best = std::min(best, dist(a.point(i), b.point(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(x, y), directed(y, x));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(AFFDIM_TEST_OUTPUT_DIR) / "attractor";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(PointCloudType, ValidatesInput) {
  EXPECT_THROW(PointCloud(0, {}), ShapeError);
  EXPECT_THROW(PointCloud(2, {1.0, 2.0, 3.0}), ShapeError);
  EXPECT_THROW(PointCloud(1, {1.0, NAN}), DomainError);
  const PointCloud c(2, {1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.point(1)[0], 3.0);
}

TEST(Sampling, CantorSetAvoidsMiddleThird) {
  for (const SamplingMode& mode : {SamplingMode(ChaosMode{20000, 3}), SamplingMode(DeterministicMode{10})}) {
    const auto cloud = sample_attractor(cantor(), mode);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double x = cloud.point(i)[0];
      EXPECT_GE(x, -1e-9);
      EXPECT_LE(x, 1.0 + 1e-9);
      EXPECT_FALSE(x > 1.0 / 3.0 + 1e-9 && x < 2.0 / 3.0 - 1e-9) << x;
    }
  }
}

TEST(Sampling, DeterministicCountIsArityToTheDepth) {
  EXPECT_EQ(sample_attractor(sierpinski(), DeterministicMode{5}).size(), 243u);
  EXPECT_EQ(sample_attractor(full_square(), DeterministicMode{4}).size(), 256u);
  const auto c = sample_attractor(cantor(), DeterministicMode{7});
  EXPECT_EQ(c.size(), 128u);
  EXPECT_EQ(c.provenance().mode, "deterministic");
  EXPECT_EQ(c.provenance().depth, 7u);
}

TEST(Sampling, DeterministicDepthBudget) {
  EXPECT_THROW(sample_attractor(full_square(), DeterministicMode{6, 1000}), ResourceError);
}

TEST(Sampling, ChaosIsReproducibleBitwise) {
  const auto a = sample_attractor(sierpinski(), ChaosMode{5000, 42});
  const auto b = sample_attractor(sierpinski(), ChaosMode{5000, 42});
  const auto c = sample_attractor(sierpinski(), ChaosMode{5000, 43});
  ASSERT_EQ(a.coords().size(), b.coords().size());
  EXPECT_TRUE(std::equal(a.coords().begin(), a.coords().end(), b.coords().begin()));
  EXPECT_FALSE(std::equal(a.coords().begin(), a.coords().end(), c.coords().begin()));
  EXPECT_EQ(a.provenance().seed, 42u);
  EXPECT_EQ(a.size(), 5000u);
}

TEST(Sampling, NonContractingRejected) {
  const AffineIFS ifs(MatrixTuple({Matrix::identity(2), 0.5 * Matrix::identity(2)}), {Vector{0, 0}, Vector{1, 0}});
  EXPECT_THROW(sample_attractor(ifs, ChaosMode{}), PreconditionError);
  EXPECT_THROW(sample_attractor(ifs, DeterministicMode{3}), PreconditionError);
}

TEST(Sampling, HausdorffInvarianceShrinksWithDepth) {
  const auto deffy = build_deffy(1.0);
  const double rho = deffy.tuple().contraction_norm();
  for (std::size_t depth : {4u, 6u, 8u}) {
    const auto cloud = sample_attractor(deffy.ifs, DeterministicMode{depth});
    std::vector<double> images;
    for (std::size_t i = 0; i < deffy.ifs.arity(); ++i) {
      for (std::size_t p = 0; p < cloud.size(); ++p) {
        const Vector y = deffy.ifs.apply(i, cloud.point(p));
        images.insert(images.end(), y.begin(), y.end());
      }
    }
    const PointCloud image(4, std::move(images));
    double diameter = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t j = i + 1; j < cloud.size(); ++j) diameter = std::max(diameter, dist(cloud.point(i), cloud.point(j)));
    EXPECT_LT(hausdorff(cloud, image), 2.0 * std::pow(rho, depth) * diameter) << "depth " << depth;
  }
}

TEST(Projection, CoordinateProjectionIsVerbatim) {
  const auto cloud = sample_attractor(build_deffy(1.0).ifs, ChaosMode{500, 1});
  Matrix q(2, 4);
  q(0, 0) = q(1, 1) = 1.0;
  const auto p = project_points(cloud, q);
  ASSERT_EQ(p.dimension(), 2u);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_DOUBLE_EQ(p.point(i)[0], cloud.point(i)[0]);
    EXPECT_DOUBLE_EQ(p.point(i)[1], cloud.point(i)[1]);
  }
}

TEST(Projection, IdentityTensorPGivesFirstAndThirdCoordinates) {
  const auto cloud = sample_attractor(build_deffy(1.0).ifs, ChaosMode{500, 2});
  const Matrix p{{1.0, 0.0}, {0.0, 0.0}};
  const auto proj = project_points(cloud, kronecker(Matrix::identity(2), p));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_DOUBLE_EQ(proj.point(i)[0], cloud.point(i)[0]);
    EXPECT_DOUBLE_EQ(proj.point(i)[1], cloud.point(i)[2]);
  }
}

TEST(Projection, IsometricOnImagePlane) {
  std::mt19937_64 rng(8);
  const auto cloud = sample_attractor(build_deffy(1.0).ifs, ChaosMode{400, 3});
  for (int trial = 0; trial < 10; ++trial) {
    // Rank-two Q: product of 4x2 and 2x4 random factors.
    const Matrix q = affdim::testing::random_matrix(rng, 4, 2) * affdim::testing::random_matrix(rng, 2, 4);
    const auto proj = project_points(cloud, q);
    for (std::size_t i = 0; i + 1 < cloud.size(); i += 7) {
      const Vector qx = q * cloud.point(i);
      const Vector qy = q * cloud.point(i + 1);
      EXPECT_NEAR(dist(proj.point(i), proj.point(i + 1)), dist(qx, qy), 1e-10);
    }
  }
}

TEST(Projection, RankMustBeTwo) {
  const auto cloud = sample_attractor(build_deffy(1.0).ifs, ChaosMode{100, 1});
  EXPECT_THROW(project_points(cloud, Matrix::identity(4)), DomainError);
  EXPECT_THROW(project_points(cloud, kronecker(line_projection(0.3), line_projection(0.1))), DomainError);
  EXPECT_THROW(project_points(cloud, Matrix::identity(3)), ShapeError);
}

TEST(BoxCount, UniformGridSlopeTwo) {
  std::vector<double> coords;
  const int n = 1000;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      coords.push_back((i + 0.5) / n);
      coords.push_back((j + 0.5) / n);
    }
  const auto r = box_count(PointCloud(2, std::move(coords)));
  EXPECT_NEAR(r.slope, 2.0, 0.1);
  EXPECT_GE(r.window.size(), 3u);
}

TEST(BoxCount, FullSquareChaosGame) {
  const auto r = box_count(sample_attractor(full_square(), ChaosMode{1'000'000, 5}));
  EXPECT_NEAR(r.slope, 2.0, 0.1);
}

TEST(BoxCount, SierpinskiSlope) {
  const auto r = box_count(sample_attractor(sierpinski(), ChaosMode{1'000'000, 6}));
  EXPECT_NEAR(r.slope, oracle::kSierpinskiDim, 0.1);
  EXPECT_GT(r.r_squared, 0.99);
}

TEST(BoxCount, SegmentSlopeOne) {
  const Matrix h{{0.5, 0.0}, {0.0, 0.5}};
  const AffineIFS seg(MatrixTuple({h, h}), {Vector{0.0, 0.0}, Vector{0.5, 0.0}});
  const auto r = box_count(sample_attractor(seg, ChaosMode{200'000, 7}));
  EXPECT_NEAR(r.slope, 1.0, 0.05);
}

TEST(BoxCount, ReportInvariants) {
  const auto r = box_count(sample_attractor(sierpinski(), ChaosMode{200'000, 9}), 12);
  ASSERT_EQ(r.levels.front(), kMinBoxLevel);
  ASSERT_EQ(r.levels.back(), 12);
  EXPECT_EQ(r.points, 200'000u);
  EXPECT_EQ(r.count_cap, 2000u);
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    EXPECT_GE(r.counts[i], 1u);
    EXPECT_LE(r.counts[i], r.points);
    EXPECT_DOUBLE_EQ(r.scales[i], std::ldexp(1.0, -r.levels[i]));
    if (i > 0) EXPECT_GE(r.counts[i], r.counts[i - 1]);
  }
  for (std::size_t w : r.window) EXPECT_LE(r.counts[w], r.count_cap);
  EXPECT_TRUE(std::isfinite(r.slope));
}

TEST(BoxCount, TooFewScalesIsEstimationError) {
  EXPECT_THROW(box_count(sample_attractor(sierpinski(), ChaosMode{500, 1})), EstimationError);
  EXPECT_THROW(box_count(PointCloud(2, std::vector<double>(2000, 0.25))), EstimationError);
  EXPECT_THROW(box_count(sample_attractor(sierpinski(), ChaosMode{500, 1}), 15), DomainError);
}

TEST(BoxCount, DeffyPanelsShowDimensionDrop) {
  const auto deffy = build_deffy(1.0);
  const auto cloud = sample_attractor(deffy.ifs, ChaosMode{1'000'000, 0x5EED});
  const Matrix p{{1.0, 0.0}, {0.0, 0.0}};
  const auto pi = box_count(project_points(cloud, kronecker(p, Matrix::identity(2))));
  const auto ip = box_count(project_points(cloud, kronecker(Matrix::identity(2), p)));
  EXPECT_LT(ip.slope, pi.slope);
  // Baseline from the independent numpy sampler (different RNG stream).
  EXPECT_NEAR(pi.slope, oracle::kRenderPanelPI, 0.05);
  EXPECT_NEAR(ip.slope, oracle::kRenderPanelIP, 0.05);
}

TEST(Render, PgmHeaderAndSize) {
  const auto cloud = sample_attractor(sierpinski(), ChaosMode{20000, 1});
  const fs::path path = scratch("sierpinski.pgm");
  const auto img = render(cloud, ImageSpec{64, 48}, path);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 64u);
  EXPECT_EQ(h, 48u);
  EXPECT_EQ(maxval, 255u);
  const auto header = static_cast<std::size_t>(in.tellg());
  EXPECT_EQ(fs::file_size(path), header + 64 * 48);
  EXPECT_EQ(img.pixels.size(), 64u * 48u);
  EXPECT_GT(img.occupied, 0u);
  EXPECT_EQ(*std::max_element(img.pixels.begin(), img.pixels.end()), 255);
}

TEST(Render, DeterministicBytes) {
  const auto cloud = sample_attractor(sierpinski(), ChaosMode{20000, 1});
  const auto a = rasterize(cloud, ImageSpec{});
  const auto b = rasterize(cloud, ImageSpec{});
  EXPECT_EQ(a.pixels, b.pixels);
}

TEST(Render, TopRowIsLargestY) {
  const PointCloud cloud(2, {0.0, 0.0, 1.0, 1.0});
  const auto img = rasterize(cloud, ImageSpec{16, 16, Bounds{0.0, 1.0, 0.0, 1.0}});
  EXPECT_GT(img.pixels[15], 0);                 // top right
  EXPECT_GT(img.pixels[15 * 16], 0);            // bottom left
  EXPECT_EQ(img.pixels[0], 0);
}

TEST(Render, Guards) {
  const auto cloud = sample_attractor(sierpinski(), ChaosMode{1000, 1});
  EXPECT_THROW(rasterize(cloud, ImageSpec{8, 64}), DomainError);
  EXPECT_THROW(rasterize(cloud, ImageSpec{64, 64, Bounds{0.0, 0.0, 0.0, 1.0}}), DomainError);
  EXPECT_THROW(rasterize(PointCloud(2, {0.5, 0.5, 0.5, 0.5}), ImageSpec{}), DomainError);
  EXPECT_THROW(render(cloud, ImageSpec{}, "/nonexistent-dir/x/y.pgm"), IoError);
  EXPECT_THROW(rasterize(PointCloud(3, {0.0, 0.0, 0.0}), ImageSpec{}), ShapeError);
}
