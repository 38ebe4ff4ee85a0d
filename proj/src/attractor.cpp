#include "affdim/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "affdim/error.hpp"
#include "affdim/linalg.hpp"

namespace affdim {

namespace {

// Spreads the low 16 bits of v to the even bit positions.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0xFFFF;
  v = (v | (v << 8)) & 0x00FF00FF;
  v = (v | (v << 4)) & 0x0F0F0F0F;
  v = (v | (v << 2)) & 0x33333333;
  v = (v | (v << 1)) & 0x55555555;
  return v;
}

std::uint64_t morton(std::uint64_t x, std::uint64_t y) { return spread_bits(x) | (spread_bits(y) << 1); }

void require_planar(const PointCloud& cloud, const char* what) {
  if (cloud.dimension() != 2) {
    throw ShapeError(std::string(what) + ": expected a two-dimensional cloud, got dimension " +
                     std::to_string(cloud.dimension()));
  }
}

PointCloud chaos_game(const AffineIFS& ifs, const ChaosMode& mode) {
  if (mode.count == 0) throw DomainError("chaos game: count must be positive");
  const std::size_t d = ifs.dimension();
  const std::uint64_t n = ifs.arity();
  std::mt19937_64 rng(mode.seed);
  Vector x = ifs.fixed_point(0);
  Vector y(d);
  for (std::size_t i = 0; i < kBurnIn; ++i) {
    ifs.apply_into(static_cast<std::size_t>(rng() % n), x, y);
    std::swap(x, y);
  }
  std::vector<double> coords;
  coords.reserve(mode.count * d);
  for (std::uint64_t i = 0; i < mode.count; ++i) {
    ifs.apply_into(static_cast<std::size_t>(rng() % n), x, y);
    std::swap(x, y);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointCloud(d, std::move(coords), {"chaos", mode.count, 0, mode.seed});
}

PointCloud image_tree(const AffineIFS& ifs, const DeterministicMode& mode) {
  const std::size_t d = ifs.dimension();
  const std::uint64_t total = word_count(ifs.arity(), mode.depth, mode.depth);
  check_word_budget(total, mode.budget, "deterministic sampling");
  std::vector<double> level = ifs.fixed_point(0);
  // Level m holds T_w(x*) for |w| = m in lexicographic order of w; the next
  // level is the concatenation over i of T_i applied to the whole level.
  for (std::size_t m = 0; m < mode.depth; ++m) {
    const std::size_t count = level.size() / d;
    std::vector<double> next(level.size() * ifs.arity());
    for (std::size_t i = 0; i < ifs.arity(); ++i) {
      for (std::size_t p = 0; p < count; ++p) {
        ifs.apply_into(i, std::span<const double>(level).subspan(p * d, d),
                       std::span<double>(next).subspan((i * count + p) * d, d));
      }
    }
    level = std::move(next);
  }
  return PointCloud(d, std::move(level), {"deterministic", total, mode.depth, 0});
}

}  // namespace

PointCloud::PointCloud(std::size_t dimension, std::vector<double> coords, CloudProvenance provenance)
    : dim_(dimension), coords_(std::move(coords)), provenance_(std::move(provenance)) {
  if (dim_ == 0) throw ShapeError("point cloud: dimension must be positive");
  if (coords_.empty() || coords_.size() % dim_ != 0) {
    throw ShapeError("point cloud: " + std::to_string(coords_.size()) + " coordinates do not form points of dimension " +
                     std::to_string(dim_));
  }
  for (double c : coords_)
    if (!std::isfinite(c)) throw DomainError("point cloud: non-finite coordinate");
}

PointCloud sample_attractor(const AffineIFS& ifs, const SamplingMode& mode) {
  ifs.linear().require_contracting();
  if (const auto* chaos = std::get_if<ChaosMode>(&mode)) return chaos_game(ifs, *chaos);
  return image_tree(ifs, std::get<DeterministicMode>(mode));
}

PointCloud project_points(const PointCloud& cloud, const Matrix& q) {
  if (q.cols() != cloud.dimension()) {
    throw ShapeError("projection: Q has " + std::to_string(q.cols()) + " columns, points have dimension " +
                     std::to_string(cloud.dimension()));
  }
  const std::size_t rank = numerical_rank(q);
  if (rank != 2) throw DomainError("projection: rank Q must be 2, got " + std::to_string(rank));
  // Rows of W = U^T Q map x straight to coordinates in the image plane.
  const Matrix u = orthonormal_column_basis(q);
  const Matrix w = u.transpose() * q;
  const std::size_t d = cloud.dimension();
  std::vector<double> out(cloud.size() * 2);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const auto x = cloud.point(p);
    for (std::size_t r = 0; r < 2; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += w(r, c) * x[c];
      out[2 * p + r] = s;
    }
  }
  CloudProvenance prov = cloud.provenance();
  prov.mode = "projected " + prov.mode;
  return PointCloud(2, std::move(out), std::move(prov));
}

Bounds cloud_bounds(const PointCloud& cloud2d) {
  require_planar(cloud2d, "bounds");
  Bounds b{cloud2d.point(0)[0], cloud2d.point(0)[0], cloud2d.point(0)[1], cloud2d.point(0)[1]};
  for (std::size_t i = 1; i < cloud2d.size(); ++i) {
    const auto p = cloud2d.point(i);
    b.xmin = std::min(b.xmin, p[0]);
    b.xmax = std::max(b.xmax, p[0]);
    b.ymin = std::min(b.ymin, p[1]);
    b.ymax = std::max(b.ymax, p[1]);
  }
  return b;
}

BoxCountReport box_count(const PointCloud& cloud2d, int finest_level) {
  require_planar(cloud2d, "box count");
  if (finest_level < kMinBoxLevel || finest_level > kMaxBoxLevel) {
    throw DomainError("box count: finest level must lie in [" + std::to_string(kMinBoxLevel) + ", " +
                      std::to_string(kMaxBoxLevel) + "]");
  }
  const Bounds b = cloud_bounds(cloud2d);
  const double side = std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  if (!(side > 0.0)) throw EstimationError("box count: all points coincide");

  const std::uint64_t cells = std::uint64_t{1} << finest_level;
  const auto cell = [&](double v, double lo) {
    const double t = std::floor((v - lo) / side * static_cast<double>(cells));
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(t, 0.0)), cells - 1);
  };
  std::vector<std::uint64_t> codes(cloud2d.size());
  for (std::size_t i = 0; i < cloud2d.size(); ++i) {
    const auto p = cloud2d.point(i);
    codes[i] = morton(cell(p[0], b.xmin), cell(p[1], b.ymin));
  }
  // Morton order is preserved by dropping low bit pairs, so one sort serves
  // every coarser level.
  std::sort(codes.begin(), codes.end());

  BoxCountReport report;
  report.points = cloud2d.size();
  report.count_cap = report.points / 100;
  for (int j = kMinBoxLevel; j <= finest_level; ++j) {
    const int shift = 2 * (finest_level - j);
    std::uint64_t count = 0;
    std::uint64_t previous = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const std::uint64_t c = codes[i] >> shift;
      if (i == 0 || c != previous) ++count;
      previous = c;
    }
    report.levels.push_back(j);
    report.scales.push_back(std::ldexp(1.0, -j));
    report.counts.push_back(count);
    if (count <= report.count_cap) report.window.push_back(report.levels.size() - 1);
  }
  if (report.window.size() < 3) {
    throw EstimationError("box count: only " + std::to_string(report.window.size()) +
                          " scales have at most points/100 occupied boxes; at least 3 are needed, so sample more "
                          "points or lower the finest level");
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  const double m = static_cast<double>(report.window.size());
  for (std::size_t idx : report.window) {
    const double x = report.levels[idx] * std::log(2.0);
    const double y = std::log(static_cast<double>(report.counts[idx]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  report.slope = cxy / vx;
  report.intercept = (sy - report.slope * sx) / m;
  report.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return report;
}

GrayImage rasterize(const PointCloud& cloud2d, const ImageSpec& spec) {
  require_planar(cloud2d, "render");
  if (spec.width < 16 || spec.height < 16) throw DomainError("render: width and height must be at least 16");
  Bounds b;
  if (spec.bounds) {
    b = *spec.bounds;
  } else {
    b = cloud_bounds(cloud2d);
    const double pad = 0.02 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
    b = {b.xmin - pad, b.xmax + pad, b.ymin - pad, b.ymax + pad};
  }
  if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin) || !std::isfinite(b.xmax - b.xmin) ||
      !std::isfinite(b.ymax - b.ymin)) {
    throw DomainError("render: degenerate bounds");
  }

  GrayImage img;
  img.width = spec.width;
  img.height = spec.height;
  img.bounds = b;
  std::vector<std::uint64_t> hits(spec.width * spec.height, 0);
  const double w = static_cast<double>(spec.width);
  const double h = static_cast<double>(spec.height);
  for (std::size_t i = 0; i < cloud2d.size(); ++i) {
    const auto p = cloud2d.point(i);
    const double fx = (p[0] - b.xmin) / (b.xmax - b.xmin) * w;
    const double fy = (p[1] - b.ymin) / (b.ymax - b.ymin) * h;
    if (fx < 0.0 || fy < 0.0 || fx > w || fy > h) continue;
    const std::size_t col = std::min(static_cast<std::size_t>(fx), spec.width - 1);
    const std::size_t row = spec.height - 1 - std::min(static_cast<std::size_t>(fy), spec.height - 1);
    ++hits[row * spec.width + col];
  }
  img.max_hits = *std::max_element(hits.begin(), hits.end());
  img.pixels.assign(hits.size(), 0);
  if (img.max_hits > 0) {
    const double denom = std::log1p(static_cast<double>(img.max_hits));
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i] == 0) continue;
      ++img.occupied;
      img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::log1p(static_cast<double>(hits[i])) / denom));
    }
  }
  return img;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

GrayImage render(const PointCloud& cloud2d, const ImageSpec& spec, const std::filesystem::path& path) {
  GrayImage img = rasterize(cloud2d, spec);
  write_pgm(img, path);
  return img;
}

}  // namespace affdim
