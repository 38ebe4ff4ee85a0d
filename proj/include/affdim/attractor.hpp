#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"
#include "affdim/wordspace.hpp"

namespace affdim {

struct CloudProvenance {
  std::string mode;  // "chaos", "deterministic", "projected" or "external"
  std::uint64_t count = 0;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
};

/// Points of R^d stored contiguously, one point per `dimension()` doubles.
class PointCloud {
 public:
  PointCloud(std::size_t dimension, std::vector<double> coords, CloudProvenance provenance = {"external"});

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::span<const double> point(std::size_t i) const noexcept {
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }
  std::span<const double> coords() const noexcept { return coords_; }
  const CloudProvenance& provenance() const noexcept { return provenance_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  CloudProvenance provenance_;
};

/// Random iteration x <- T_i x with i uniform, after discarding kBurnIn
/// iterates started at the fixed point of T_1.
struct ChaosMode {
  std::uint64_t count = 100'000;
  std::uint64_t seed = 0x5EED;
};

/// Every image T_w(x*) for |w| = depth, x* the fixed point of T_1, in
/// lexicographic order of w.
struct DeterministicMode {
  std::size_t depth = 8;
  std::uint64_t budget = kDefaultWordBudget;
};

using SamplingMode = std::variant<ChaosMode, DeterministicMode>;

inline constexpr std::size_t kBurnIn = 100;

PointCloud sample_attractor(const AffineIFS& ifs, const SamplingMode& mode);

/// Coordinates of Q x in the orthonormal basis (Gram-Schmidt in column order)
/// of the column space of Q. Requires rank Q = 2.
PointCloud project_points(const PointCloud& cloud, const Matrix& q);

struct BoxCountReport {
  std::vector<double> scales;          // 2^-j
  std::vector<int> levels;             // j
  std::vector<std::uint64_t> counts;   // occupied boxes at 2^-j
  std::vector<std::size_t> window;     // indices into the arrays above used in the fit
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::uint64_t points = 0;
  std::uint64_t count_cap = 0;         // counts above this were dropped from the fit
};

inline constexpr int kMinBoxLevel = 3;
inline constexpr int kMaxBoxLevel = 14;

/// Dyadic box counting on the cloud rescaled to the unit square (aspect
/// preserved), at levels 3..finest_level. Levels whose count exceeds
/// points/100 are left out of the least-squares fit.
BoxCountReport box_count(const PointCloud& cloud2d, int finest_level = 10);

struct Bounds {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
};

/// Tight bounding rectangle of a two-dimensional cloud.
Bounds cloud_bounds(const PointCloud& cloud2d);

struct ImageSpec {
  std::size_t width = 512;
  std::size_t height = 512;
  /// Defaults to the cloud's bounding rectangle padded by 2%.
  std::optional<Bounds> bounds;
};

/// 8-bit grayscale raster, row 0 at the top (largest y).
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
  Bounds bounds;
  std::uint64_t max_hits = 0;
  std::uint64_t occupied = 0;
};

/// Per-pixel hit counts mapped through log(1 + hits) / log(1 + max hits).
GrayImage rasterize(const PointCloud& cloud2d, const ImageSpec& spec);

/// Binary PGM: "P5\n<w> <h>\n255\n" followed by row-major bytes.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

GrayImage render(const PointCloud& cloud2d, const ImageSpec& spec, const std::filesystem::path& path);

}  // namespace affdim
