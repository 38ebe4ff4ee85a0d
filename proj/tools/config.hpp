#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "affdim/matrix.hpp"
#include "affdim/matrix_tuple.hpp"

namespace affdim::cli {

/// Factor data for systems of the form M_i = A_i (x) B_i, used by projdim to
/// report the Kronecker projected bound alongside the generic estimate.
struct KroneckerFactors {
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  Matrix p;  // rank-one projection acting on the second factor
};

/// Parsed IFS configuration file.
///
///   {
///     "dimension": 2,
///     "maps": [{"linear": [[0.5, 0], [0, 0.5]], "translation": [0, 0]}, ...],
///     "projection": [[...]],                      (optional, d x d or 2 x d)
///     "labels": ["T1", ...],                      (optional)
///     "kronecker": {"a": [...], "b": [...], "p": [[...]]}   (optional)
///   }
///
/// Numbers may be given as JSON numbers or decimal strings.
struct IFSConfig {
  std::size_t dimension = 0;
  std::vector<Matrix> linear;
  std::vector<Vector> translations;
  std::optional<Matrix> projection;
  std::vector<std::string> labels;
  std::optional<KroneckerFactors> kronecker;

  MatrixTuple tuple() const { return MatrixTuple(linear); }
  AffineIFS ifs() const { return AffineIFS(tuple(), translations); }
};

/// Throws ConfigError with a JSON-pointer-like location on any schema violation.
IFSConfig parse_config(const nlohmann::json& j);

/// Reads and parses a file; IoError when unreadable, ConfigError when malformed.
nlohmann::json load_json(const std::filesystem::path& path);

/// A matrix given either inline as JSON text or as a path to a JSON file.
Matrix parse_matrix_argument(const std::string& text, const std::string& what);

Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json matrix_to_json(const Matrix& m);

/// Coordinate projection onto 1-based coordinates i, j as a d x d diagonal
/// 0/1 matrix ("1,3" in dimension 4 gives I (x) P with P = diag(1, 0)).
Matrix coordinate_projection(const std::string& spec, std::size_t dimension);

/// SHA-256 of the compact JSON dump, hex encoded.
std::string digest(const nlohmann::json& j);

}  // namespace affdim::cli
