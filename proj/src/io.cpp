#include <jetx/io.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace jetx {

namespace {

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < byte; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw SchemaError(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  return j.get<double>();
}

Vec vec_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array");
  if (j.size() > static_cast<std::size_t>(kMaxDim)) throw SchemaError(what + " has more than 4 components");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void dump(const json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), end(2 * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n" + end + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (points, gradients) stay on one line.
      bool flat = j.size() <= 4;
      for (const auto& e : j) flat = flat && e.is_number();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, depth + 1);
      }
      out += "\n" + end + "]";
      return;
    }
    case json::value_t::number_float:
      out += fmt(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

json named(const std::vector<std::pair<std::string, double>>& v) {
  json o = json::object();
  for (const auto& [k, x] : v) o[k] = x;
  return o;
}

json witness(const std::vector<Vec>& w) {
  json a = json::array();
  for (const Vec& v : w) a.push_back(to_json(v));
  return a;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ": " + e.what(), line);
  }
}

Jet jet_from_json(const json& j) {
  const json& d = field(j, "dim");
  if (!d.is_number_integer()) throw SchemaError("dim must be an integer");
  const int dim = d.get<int>();
  const json &P = field(j, "points"), &F = field(j, "values"), &G = field(j, "gradients");
  if (!P.is_array() || !F.is_array() || !G.is_array()) throw SchemaError("points, values and gradients must be arrays");
  std::vector<Vec> pts, grads;
  std::vector<double> vals;
  for (const auto& p : P) pts.push_back(vec_from(p, "point"));
  for (const auto& f : F) vals.push_back(number(f, "value"));
  for (const auto& g : G) grads.push_back(vec_from(g, "gradient"));
  return Jet::make(dim, std::move(pts), std::move(vals), std::move(grads));
}

Jet parse_jet(const std::string& text) { return jet_from_json(parse_json_text(text)); }

Jet load_jet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_jet(ss.str());
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Jet& jet) {
  json j;
  j["dim"] = jet.dim;
  j["points"] = witness(jet.points);
  j["values"] = jet.values;
  j["gradients"] = witness(jet.gradients);
  return j;
}

Modulus modulus_from_json(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) throw SchemaError("modulus kind must be a string");
  const std::string kind = k.get<std::string>();
  if (kind == "holder") return Modulus::holder(number(field(j, "alpha"), "alpha"));
  if (kind == "linear") return Modulus::linear(j.contains("slope") ? number(j["slope"], "slope") : 1.0);
  if (kind == "capped") return Modulus::capped(modulus_from_json(field(j, "base")), number(field(j, "knee"), "knee"));
  if (kind == "tabulated") {
    const json& s = field(j, "samples");
    if (!s.is_array()) throw SchemaError("samples must be an array");
    std::vector<std::pair<double, double>> tab;
    for (const auto& e : s) {
      if (!e.is_array() || e.size() != 2) throw SchemaError("each sample must be a [t, w] pair");
      tab.emplace_back(number(e[0], "t"), number(e[1], "w"));
    }
    return Modulus::tabulated(std::move(tab));
  }
  throw SchemaError("unknown modulus kind \"" + kind + "\"");
}

Modulus parse_modulus(const std::string& text) { return modulus_from_json(parse_json_text(text)); }

json to_json(const Modulus& m) {
  json j;
  switch (m.kind()) {
    case Modulus::Kind::holder:
      j["kind"] = "holder";
      j["alpha"] = m.exponent();
      break;
    case Modulus::Kind::linear:
      j["kind"] = "linear";
      j["slope"] = m.omega(1.0);
      break;
    case Modulus::Kind::tabulated: {
      j["kind"] = "tabulated";
      json s = json::array();
      for (const auto& [t, w] : m.samples()) s.push_back({t, w});
      j["samples"] = s;
      break;
    }
    case Modulus::Kind::capped:
      j["kind"] = "capped";
      j["base"] = to_json(m.base());
      j["knee"] = m.knee();
      break;
  }
  return j;
}

json to_json(const CheckReport& r) {
  json j;
  j["condition"] = to_string(r.condition);
  j["constant"] = r.constant;
  j["worst_slack"] = r.worst_slack;
  j["tol"] = r.tol;
  j["passed"] = r.passed;
  j["witness"] = witness(r.witness);
  j["warnings"] = r.warnings;
  j["details"] = named(r.details);
  return j;
}

json to_json(const VerificationReport& r) {
  json j;
  j["passed"] = r.passed();
  j["grid_tol"] = r.grid_tol;
  j["abs_tol"] = r.abs_tol;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  json checks = json::array();
  for (const BoundCheck& c : r.checks) {
    json o;
    o["name"] = c.name;
    o["sense"] = c.sense == BoundCheck::Sense::at_most ? "at_most" : "at_least";
    o["bound"] = c.bound;
    o["observed"] = c.observed;
    o["rel_tol"] = c.rel_tol;
    o["abs_tol"] = c.abs_tol;
    o["passed"] = c.passed;
    o["witness"] = witness(c.witness);
    checks.push_back(o);
  }
  j["checks"] = checks;
  j["values"] = named(r.values);
  return j;
}

json diagnostics_json(const ExtensionResult& r) {
  json j;
  j["variant"] = to_string(r.variant);
  j["modulus"] = to_json(r.modulus_used);
  j["M_used"] = r.M_used;
  j["C_used"] = r.C_used;
  j["A_computed"] = r.A_computed;
  j["lipschitz_cap"] = r.lipschitz_cap;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["eps"] = r.eps;
  j["nodes"] = r.F.spec.num_nodes();
  j["diagnostics"] = named(r.diagnostics);
  return j;
}

std::string dump_json(const json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

void write_grid_csv(std::ostream& os, const ExtensionResult& r) {
  const GridSpec& s = r.F.spec;
  static const char* axes[] = {"x0", "x1", "x2", "x3"};
  for (int a = 0; a < s.dim; ++a) os << axes[a] << ',';
  os << 'F';
  for (int a = 0; a < s.dim; ++a) os << ",dF" << a;
  os << '\n';
  char buf[40];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  };
  for (std::size_t i = 0; i < s.num_nodes(); ++i) {
    const Vec x = s.node(i);
    for (int a = 0; a < s.dim; ++a) put(x(a)), os << ',';
    put(r.F[i]);
    for (int a = 0; a < s.dim; ++a) os << ',', put(r.grad_F[i](a));
    os << '\n';
  }
}

void write_conjugate_csv(std::ostream& os, const Modulus& m, double t_max, int points) {
  if (points < 2 || !(t_max > 0.0)) throw DomainError("conjugate table needs points >= 2 and t_max > 0");
  os << "t,omega,phi,phi_star\n";
  char buf[128];
  for (int i = 0; i < points; ++i) {
    const double t = t_max * i / (points - 1);
    double ps;
    try {
      ps = m.phi_star(t);
    } catch (const RangeExceeded&) {
      ps = std::numeric_limits<double>::infinity();
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, m.omega(t), m.phi(t), ps);
    os << buf;
  }
}

}  // namespace jetx
