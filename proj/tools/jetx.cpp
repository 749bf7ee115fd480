// jetx: check, extend and verify 1-jets from the command line.
#include <jetx/io.hpp>
#include <jetx/parallel.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace jetx;

namespace {

enum Status { kOk = 0, kError = 1, kNotExtendable = 2, kFailed = 3 };

struct Config {
  std::string jet_path;
  std::string modulus = R"({"kind":"linear","slope":1})";
  double M = -1.0;
  std::string variant = "general";
  double p = 2.0;
  std::string box;
  std::string res;
  long samples = 10000;
  std::uint64_t seed = 1;
  std::string out;
  double search_width = -1.0;
  int search_res = 101;
  double t_max = 10.0;
  int points = 101;
};

std::vector<double> split_numbers(const std::string& s, char sep) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw SchemaError("cannot read number \"" + item + "\"");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw SchemaError("cannot read number \"" + item + "\"");
    v.push_back(x);
  }
  return v;
}

Modulus load_modulus(const std::string& s) {
  if (!s.empty() && s[0] == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw Error("cannot open " + s.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_modulus(ss.str());
  }
  return parse_modulus(s);
}

GridSpec make_grid(const Config& c, const Jet& jet) {
  const int n = jet.dim;
  std::vector<double> lo(n), hi(n);
  if (c.box.empty()) {
    // Bounding box of E grown by the diameter on each side.
    double d = jet.diameter();
    if (!(d > 0.0)) d = 1.0;
    for (int a = 0; a < n; ++a) {
      lo[a] = hi[a] = jet.points[0](a);
      for (const Vec& x : jet.points) lo[a] = std::min(lo[a], x(a)), hi[a] = std::max(hi[a], x(a));
      lo[a] -= d;
      hi[a] += d;
    }
  } else {
    std::stringstream ss(c.box);
    std::string part;
    int a = 0;
    while (std::getline(ss, part, ';')) {
      const auto v = split_numbers(part, ',');
      if (v.size() != 2 || a >= n) throw SchemaError("--box needs one \"lo,hi\" pair per axis");
      lo[a] = v[0];
      hi[a] = v[1];
      ++a;
    }
    if (a != n) throw SchemaError("--box needs one \"lo,hi\" pair per axis");
  }
  std::vector<int> shape(n, n == 1 ? 257 : n == 2 ? 129 : 33);
  if (!c.res.empty()) {
    const auto v = split_numbers(c.res, ',');
    if (v.size() != 1 && v.size() != static_cast<std::size_t>(n)) throw SchemaError("--res needs 1 or n values");
    for (int a = 0; a < n; ++a) shape[a] = static_cast<int>(v.size() == 1 ? v[0] : v[a]);
  }
  double total = n;
  for (int k : shape) {
    if (k < 17 || k > 2049) throw GridError("resolution per axis must lie in [17, 2049]");
    total *= k;
  }
  if (total > 2e7) throw GridError("grid too large: n * nodes exceeds 2e7");
  return GridSpec::make(n, lo, hi, shape);
}

SearchBox search_box(const Config& c) {
  SearchBox s;
  s.half_width = c.search_width;
  s.resolution = c.search_res;
  return s;
}

void emit(const Config& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name);
  if (!f) throw Error("cannot write " + (fs::path(c.out) / name).string());
  f << text;
}

int not_extendable(const Config& c, const std::string& why) {
  json j;
  j["status"] = "not_extendable";
  j["reason"] = why;
  emit(c, "report.json", dump_json(j));
  std::cerr << why << '\n';
  return kNotExtendable;
}

int run_check(const Config& c) {
  const Jet jet = load_jet(c.jet_path);
  const Modulus m = load_modulus(c.modulus);
  const SearchBox sb = search_box(c);
  json j;
  j["modulus"] = to_json(m);
  j["points"] = jet.size();
  const CheckReport A = compute_A(jet, m, sb);
  j["A"] = to_json(A);
  j["M_omega_G"] = to_json(m_omega_G(jet, m));
  if (!std::isfinite(A.constant) || A.constant > 1e8) {
    j["status"] = "not_extendable";
    emit(c, "check.json", dump_json(j));
    return kNotExtendable;
  }
  const double M = c.M > 0.0 ? c.M : std::max(A.constant, 1e-8);
  j["M"] = M;
  j["W"] = to_json(check_W(jet, m, M));
  j["mg"] = to_json(check_mg(jet, m, M, sb));
  if (m.kind() == Modulus::Kind::linear) j["W11"] = to_json(check_wells_W11(jet, M * m.omega(1.0)));
  j["equivalences"] = to_json(check_equivalences(jet, m, sb));
  j["status"] = "ok";
  emit(c, "check.json", dump_json(j));
  return kOk;
}

ExtensionResult build(const Config& c, const Jet& jet, const Modulus& m) {
  ExtendOptions opt;
  opt.variant = parse_variant(c.variant);
  opt.M = c.M;
  opt.p = c.p;
  opt.search = search_box(c);
  opt.seed = c.seed;
  return extend(jet, m, make_grid(c, jet), opt);
}

int run_extend(const Config& c) {
  const Jet jet = load_jet(c.jet_path);
  const Modulus m = load_modulus(c.modulus);
  ExtensionResult r;
  try {
    r = build(c, jet, m);
  } catch (const NotExtendable& e) {
    return not_extendable(c, e.what());
  }
  std::ostringstream csv;
  write_grid_csv(csv, r);
  if (c.out.empty()) {
    std::cout << dump_json(diagnostics_json(r));
    return kOk;
  }
  emit(c, "grid.csv", csv.str());
  emit(c, "diagnostics.json", dump_json(diagnostics_json(r)));
  return kOk;
}

int run_verify(const Config& c) {
  const Jet jet = load_jet(c.jet_path);
  const Modulus m = load_modulus(c.modulus);
  ExtensionResult r;
  try {
    r = build(c, jet, m);
  } catch (const NotExtendable& e) {
    return not_extendable(c, e.what());
  }
  const VerificationReport v = verify_extension(jet, m, r, c.samples, c.seed);
  json j = to_json(v);
  j["extension"] = diagnostics_json(r);
  emit(c, "verification.json", dump_json(j));
  return v.passed() ? kOk : kFailed;
}

int run_conjugate(const Config& c) {
  const Modulus m = load_modulus(c.modulus);
  std::ostringstream os;
  write_conjugate_csv(os, m, c.t_max, c.points);
  emit(c, "conjugate.csv", os.str());
  return kOk;
}

int run_golden(const Config& c) {
  const VerificationReport v = golden_example_holder_half();
  emit(c, "golden.json", dump_json(to_json(v)));
  return v.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jetx: C^{1,w} extension of 1-jets by paraconvex envelopes"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s, bool jet) {
    if (jet) s->add_option("--jet", c.jet_path, "jet JSON file")->required()->check(CLI::ExistingFile);
    s->add_option("--modulus", c.modulus, "modulus JSON, or @file");
    s->add_option("--out", c.out, "output directory (default: stdout)");
  };
  auto grid = [&](CLI::App* s) {
    s->add_option("--M", c.M, "constant M (default: A(f,G))");
    s->add_option("--variant", c.variant, "general|holder|c11|bounded|lipschitz|lp")
        ->check(CLI::IsMember({"general", "holder", "c11", "bounded", "lipschitz", "lp"}));
    s->add_option("--p", c.p, "lp exponent in (1, 2]");
    s->add_option("--box", c.box, "\"lo,hi;lo,hi;...\"");
    s->add_option("--res", c.res, "\"k\" or \"k,k,...\" nodes per axis");
  };
  auto search = [&](CLI::App* s) {
    s->add_option("--search-width", c.search_width, "half width of the x search box");
    s->add_option("--search-res", c.search_res, "search grid points per axis");
  };

  auto* check = app.add_subcommand("check", "W, mg, W11, A, M_w(G) and the equivalence constants");
  common(check, true);
  check->add_option("--M", c.M, "constant M for W/mg/W11 (default: A(f,G))");
  search(check);

  auto* ext = app.add_subcommand("extend", "build the extension on a grid");
  common(ext, true);
  grid(ext);
  search(ext);

  auto* ver = app.add_subcommand("verify", "build and certify the extension");
  common(ver, true);
  grid(ver);
  search(ver);
  ver->add_option("--samples", c.samples, "samples per check")->check(CLI::PositiveNumber);
  ver->add_option("--seed", c.seed, "sampling seed");

  auto* conj = app.add_subcommand("conjugate", "table of omega, phi and phi*");
  common(conj, false);
  conj->add_option("--tmax", c.t_max, "largest t");
  conj->add_option("--points", c.points, "table rows");

  auto* gold = app.add_subcommand("golden", "run the worked example f = (2/3)|x|^{3/2}");
  common(gold, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*check) return run_check(c);
    if (*ext) return run_extend(c);
    if (*ver) return run_verify(c);
    if (*conj) return run_conjugate(c);
    if (*gold) return run_golden(c);
  } catch (const ParseError& e) {
    std::cerr << "parse error (line " << e.line() << "): " << e.what() << '\n';
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
  } catch (const NotExtendable& e) {
    std::cerr << "not extendable: " << e.what() << '\n';
    return kNotExtendable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kError;
}
