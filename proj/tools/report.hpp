#pragma once

#include <ostream>

#include <json.hpp>

#include "affdim/attractor.hpp"
#include "affdim/gallery.hpp"
#include "affdim/pressure.hpp"
#include "affdim/structure.hpp"

namespace affdim::cli {

nlohmann::json encode(const DimensionBracket& b);
nlohmann::json encode(const CertificateReport& r);
nlohmann::json encode(const BoxCountReport& r);
nlohmann::json encode(const Theorem3Report& r);
nlohmann::json encode(const CloudProvenance& p);

/// Human-readable rendering of a RunReport: one "key  value" line per leaf,
/// with nested keys joined by dots and long numeric arrays summarised.
void print_table(const nlohmann::json& report, std::ostream& out);

}  // namespace affdim::cli
