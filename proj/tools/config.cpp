#include "config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "affdim/error.hpp"

namespace affdim::cli {

using nlohmann::json;

namespace {

double number_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && end == s.data() + s.size() && std::isfinite(v)) return v;
    throw ConfigError(where + ": '" + s + "' is not a finite decimal number");
  }
  throw ConfigError(where + ": expected a number");
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number_from_json(j[i], where + "/" + std::to_string(i)));
  return v;
}

std::vector<Matrix> tuple_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], where + "/" + std::to_string(i)));
  return out;
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing required field '" + key + "'");
  return j.at(key);
}

}  // namespace

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    rows.push_back(vector_from_json(j[r], where + "/" + std::to_string(r)));
    if (rows.back().size() != rows.front().size() || rows.back().empty())
      throw ConfigError(where + ": rows must be non-empty and of equal length");
  }
  return Matrix::from_rows(rows);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

IFSConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  IFSConfig cfg;
  const json& dim = require(j, "dimension", "config");
  if (!dim.is_number_integer() || dim.get<long long>() < 1) throw ConfigError("config/dimension: expected a positive integer");
  cfg.dimension = dim.get<std::size_t>();

  const json& maps = require(j, "maps", "config");
  if (!maps.is_array()) throw ConfigError("config/maps: expected an array");
  if (maps.size() < 2) throw ConfigError("config/maps: at least 2 maps are required, got " + std::to_string(maps.size()));
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string where = "config/maps/" + std::to_string(i);
    Matrix a = matrix_from_json(require(maps[i], "linear", where), where + "/linear");
    if (a.rows() != cfg.dimension || a.cols() != cfg.dimension)
      throw ConfigError(where + "/linear: expected " + std::to_string(cfg.dimension) + "x" +
                        std::to_string(cfg.dimension) + ", got " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
    Vector v = maps[i].contains("translation") ? vector_from_json(maps[i]["translation"], where + "/translation")
                                               : Vector(cfg.dimension, 0.0);
    if (v.size() != cfg.dimension)
      throw ConfigError(where + "/translation: expected length " + std::to_string(cfg.dimension));
    cfg.linear.push_back(std::move(a));
    cfg.translations.push_back(std::move(v));
  }

  if (j.contains("projection")) {
    Matrix q = matrix_from_json(j["projection"], "config/projection");
    if (q.cols() != cfg.dimension) throw ConfigError("config/projection: expected " + std::to_string(cfg.dimension) + " columns");
    cfg.projection = std::move(q);
  }
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw ConfigError("config/labels: expected an array of strings");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw ConfigError("config/labels: expected an array of strings");
      cfg.labels.push_back(l.get<std::string>());
    }
  }
  if (j.contains("kronecker")) {
    const json& k = j["kronecker"];
    KroneckerFactors f{tuple_from_json(require(k, "a", "config/kronecker"), "config/kronecker/a"),
                       tuple_from_json(require(k, "b", "config/kronecker"), "config/kronecker/b"),
                       matrix_from_json(require(k, "p", "config/kronecker"), "config/kronecker/p")};
    if (f.a.size() != cfg.linear.size() || f.b.size() != cfg.linear.size())
      throw ConfigError("config/kronecker: factor tuples must have one entry per map");
    cfg.kronecker = std::move(f);
  }
  return cfg;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Matrix parse_matrix_argument(const std::string& text, const std::string& what) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      return matrix_from_json(json::parse(text), what);
    } catch (const json::parse_error& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  return matrix_from_json(load_json(text), what);
}

Matrix coordinate_projection(const std::string& spec, std::size_t dimension) {
  const auto comma = spec.find(',');
  const auto parse = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || v < 1 || v > dimension)
      throw ConfigError("--coords: '" + spec + "' must be two distinct 1-based coordinates in [1, " +
                        std::to_string(dimension) + "]");
    return v - 1;
  };
  if (comma == std::string::npos) throw ConfigError("--coords: expected 'i,j', got '" + spec + "'");
  const std::string_view sv(spec);
  const std::size_t i = parse(sv.substr(0, comma));
  const std::size_t k = parse(sv.substr(comma + 1));
  if (i == k) throw ConfigError("--coords: coordinates must differ");
  Matrix q(dimension, dimension);
  q(i, i) = q(k, k) = 1.0;
  return q;
}

std::string digest(const json& j) {
  const std::string text = j.dump();
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), hash, &len, EVP_sha256(), nullptr) != 1)
    throw Error("digest: SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(hash[i]);
  return "sha256:" + os.str();
}

}  // namespace affdim::cli
