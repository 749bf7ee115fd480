#pragma once

#include <jetx/check_report.hpp>
#include <jetx/envelope.hpp>
#include <jetx/jet.hpp>
#include <jetx/modulus.hpp>
#include <jetx/verify.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace jetx {

using json = nlohmann::json;

/// Parses JSON text; syntax errors become ParseError with a 1-based line.
json parse_json_text(const std::string& text);

/// {"dim":n,"points":[[...]],"values":[...],"gradients":[[...]]}
Jet jet_from_json(const json& j);
Jet parse_jet(const std::string& text);
Jet load_jet(const std::string& path);
json to_json(const Jet& jet);

/// {"kind":"holder","alpha":a} | {"kind":"linear","slope":s} |
/// {"kind":"tabulated","samples":[[t,w],...]} | {"kind":"capped","base":{...},"knee":k}
Modulus modulus_from_json(const json& j);
Modulus parse_modulus(const std::string& text);
json to_json(const Modulus& m);

json to_json(const Vec& v);
json to_json(const CheckReport& r);
json to_json(const VerificationReport& r);
/// M_used, C_used, iterations, residual and the named diagnostics.
json diagnostics_json(const ExtensionResult& r);

/// Deterministic dump: 2-space indent, doubles at 17 significant digits,
/// non-finite numbers as the strings "inf", "-inf", "nan".
std::string dump_json(const json& j);

/// One row per node: coordinates, F, gradient components.
void write_grid_csv(std::ostream& os, const ExtensionResult& r);
/// Columns t, omega, phi, phi_star at `points` equispaced t in [0, t_max].
void write_conjugate_csv(std::ostream& os, const Modulus& m, double t_max, int points);

}  // namespace jetx
