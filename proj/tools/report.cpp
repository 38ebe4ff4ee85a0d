#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "config.hpp"

namespace affdim::cli {

using nlohmann::json;

namespace {

// JSON has no infinity; keep the value readable and round-trippable.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json quantities(const std::vector<Quantity>& qs) {
  json out = json::object();
  for (const auto& q : qs) out[q.name] = number(q.value);
  return out;
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const json& v, const std::string& key, std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    for (const auto& [k, child] : v.items()) flatten(child, key.empty() ? k : key + "." + k, rows);
    return;
  }
  if (v.is_array()) {
    const bool scalars = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
    if (scalars && v.size() <= 8) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + scalar_text(v[i]);
      rows.emplace_back(key, s + "]");
    } else if (scalars) {
      rows.emplace_back(key, "[" + std::to_string(v.size()) + " values]");
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], key + "[" + std::to_string(i) + "]", rows);
    }
    return;
  }
  rows.emplace_back(key, scalar_text(v));
}

}  // namespace

json encode(const DimensionBracket& b) {
  return {{"lower", b.lower},           {"upper", b.upper},
          {"level", b.level},           {"tolerance", b.tolerance},
          {"iterations", b.iterations}, {"certified_upper", b.certified_upper},
          {"label", b.label}};
}

json encode(const CertificateReport& r) {
  json witness = json::object();
  if (r.witness.word) witness["word"] = r.witness.word->str();
  if (!r.witness.subspace.empty()) witness["subspace"] = matrix_to_json(r.witness.subspace);
  if (r.witness.center) witness["center"] = *r.witness.center;
  if (r.witness.radius) witness["radius"] = *r.witness.radius;
  if (!r.witness.quantities.empty()) witness["quantities"] = quantities(r.witness.quantities);
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", number(c.value)},
                      {"relation", c.relation},
                      {"threshold", number(c.threshold)}});
  }
  return {{"property", r.property}, {"verdict", verdict_name(r.verdict)},
          {"witness", witness},     {"tolerances", quantities(r.tolerances)},
          {"checks", checks},       {"note", r.note}};
}

json encode(const BoxCountReport& r) {
  return {{"levels", r.levels},   {"scales", r.scales},       {"counts", r.counts},
          {"window", r.window},   {"slope", r.slope},         {"intercept", r.intercept},
          {"r_squared", r.r_squared}, {"points", r.points},   {"count_cap", r.count_cap}};
}

json encode(const CloudProvenance& p) {
  json out = {{"mode", p.mode}};
  if (p.mode == "chaos") {
    out["count"] = p.count;
    out["seed"] = p.seed;
    out["burn_in"] = kBurnIn;
  } else if (p.mode == "deterministic") {
    out["depth"] = p.depth;
    out["count"] = p.count;
  }
  return out;
}

json encode(const Theorem3Report& r) {
  json prox = json::array(), irr = json::array(), sweep = json::array();
  for (const auto& p : r.proximality) prox.push_back(encode(p));
  for (const auto& p : r.irreducibility) irr.push_back(encode(p));
  for (const auto& e : r.sweep) {
    json entry = {{"angle", e.angle}, {"bound", encode(e.bound)}};
    if (e.empirical) entry["empirical"] = encode(*e.empirical);
    sweep.push_back(entry);
  }
  return {{"constraints", encode(r.constraints)},
          {"tensor_strong_irreducibility", encode(r.tensor)},
          {"proximality", prox},
          {"irreducibility", irr},
          {"irreducibility_note", "order 2 is reported but excluded from all_pass: every A (x) B preserves the two "
                                  "three-dimensional summands of the exterior square"},
          {"strong_separation", encode(r.separation)},
          {"affinity_dimension", encode(r.dimaff)},
          {"projection_sweep", sweep},
          {"sweep_spread", r.sweep_spread},
          {"pressure_one_lower", r.pressure_one_lower},
          {"pressure_one_threshold", r.pressure_one_threshold},
          {"pressure_two_upper", r.pressure_two_upper},
          {"pressure_two_threshold", r.pressure_two_threshold},
          {"envelope_one", r.envelope_one},
          {"envelope_two", r.envelope_two},
          {"gap_margin", r.gap_margin},
          {"gap_label", r.gap_label},
          {"all_pass", r.all_pass},
          {"failures", r.failures}};
}

void print_table(const json& report, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

}  // namespace affdim::cli
