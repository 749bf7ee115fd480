// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance [k ...]
// to run a subset. Exit status 1 when any selected criterion fails.
#include "oracles.hpp"

#include <jetx/envelope.hpp>
#include <jetx/jet.hpp>
#include <jetx/modulus.hpp>
#include <jetx/verify.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace jetx;
using oracle::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
};

GridSpec cube(int n, double lo, double hi, int res) {
  return GridSpec::make(n, std::vector<double>(n, lo), std::vector<double>(n, hi), std::vector<int>(n, res));
}

// Moves the jet's points onto their nearest nodes so snapping is exact.
Jet nodal(const GridSpec& s, const Jet& raw) {
  Jet j = raw;
  for (std::size_t i = 0; i < j.size(); ++i) j.points[i] = s.node(static_cast<std::size_t>(s.nearest(raw.points[i])));
  return Jet::make(j.dim, j.points, j.values, j.gradients);
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

VerifyOptions sampled_only() {
  VerifyOptions o;
  o.rebuild_check = false;
  o.family_points = 0;
  return o;
}

// 1. Worked example on 401 points.
Outcome c1() {
  std::vector<Vec> p, g;
  std::vector<double> f;
  for (int i = 0; i < 401; ++i) {
    const double x = -1.0 + 2.0 * i / 400;
    p.push_back(vec({x}));
    f.push_back(2.0 / 3.0 * std::pow(std::abs(x), 1.5));
    g.push_back(vec({std::copysign(std::sqrt(std::abs(x)), x)}));
  }
  const Jet jet = Jet::make(1, p, f, g);
  const Modulus m = Modulus::holder(0.5);
  const auto t0 = std::chrono::steady_clock::now();
  const double Mw = m_omega_G(jet, m).constant;
  const double A = compute_A(jet, m).constant;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = std::abs(Mw - std::sqrt(2.0)) <= 1e-3 && A >= 1.30 && A <= 1.3076 && A < Mw && secs <= 10.0;
  o.note = fmt("M_omega(G) = %.6f, A = %.6f, ", Mw, A) + fmt("%.2f s", secs);
  return o;
}

// 2. Modulus identities at 1000 t in (0, 100].
Outcome c2() {
  std::vector<double> ts;
  for (int i = 1; i <= 1000; ++i) ts.push_back(100.0 * i / 1000.0);
  const std::vector<Modulus> mods = {Modulus::linear(1.0), Modulus::holder(0.5), Modulus::holder(0.25),
                                     Modulus::tabulated({{0.0, 0.0}, {0.5, 0.8}, {2.0, 1.5}, {10.0, 3.0}, {100.0, 8.0}})};
  Outcome o;
  double worst = 1e300, fy = 0.0;
  for (const Modulus& m : mods) {
    const CheckReport r = check_modulus_identities(m, ts, 1e-6);
    worst = std::min(worst, r.worst_slack);
    o.pass = o.pass && r.passed && r.worst_slack >= -1e-6;
    for (double t : ts) {
      const double s = m.omega(t);
      fy = std::max(fy, std::abs(m.phi(t) + m.phi_star(s) - s * t) / std::max(1.0, s * t));
    }
  }
  o.pass = o.pass && fy <= 1e-6;
  o.note = fmt("worst slack %.3g, Fenchel-Young equality error %.3g", worst, fy);
  return o;
}

// 3. Wells closed form vs mg at 0.9 and 1.1 times the threshold.
Outcome c3() {
  int agree = 0, total = 0;
  const Modulus lin = Modulus::linear(1.0);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 2, count = 2 + k % 5;
    const Jet j = oracle::random_jet(n, count, 3000 + k);
    const ThresholdResult t = smallest_constant([&](double M) { return check_wells_W11(j, M).passed; });
    for (double s : {0.9, 1.1}) {
      const double M = s * t.value;
      ++total;
      agree += check_wells_W11(j, M).passed == check_mg(j, lin, M).passed;
    }
  }
  Outcome o;
  o.pass = agree == total;
  o.note = fmt("%.0f / %.0f agree", agree, total);
  return o;
}

// 4. Interpolation and sandwich on 50 jets.
Outcome c4() {
  const Modulus h = Modulus::holder(0.5);
  double worst_f = 0.0, worst_g = 0.0, worst_s = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 2;
    const GridSpec s = n == 1 ? cube(1, -3.0, 3.0, 257) : cube(2, -3.0, 3.0, 65);
    const Jet j = nodal(s, oracle::random_jet(n, 2 + k % 7, 4000 + k, 0.35));
    const ExtensionResult r = extend(j, h, s);
    const double hh = s.max_spacing();
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::size_t node = r.snapped[i];
      worst_f = std::max(worst_f, std::abs(r.F[node] - j.values[i]) / std::max(1.0, std::abs(j.values[i])));
      worst_g = std::max(worst_g, (r.grad_F[node] - j.gradients[i]).norm() / (10.0 * r.M_used * h.omega(hh)));
    }
    for (std::size_t i = 0; i < s.num_nodes(); ++i) {
      worst_s = std::max({worst_s, r.lower[i] - r.F[i], r.F[i] - r.upper[i]});
    }
  }
  Outcome o;
  o.pass = worst_f <= 1e-12 && worst_g <= 1.0 && worst_s <= 0.0;
  o.note = fmt("max |F-f| %.3g, max |grad F - G| / (10 M w(h)) %.3f, max sandwich excess %.3g", worst_f, worst_g, worst_s);
  return o;
}

// 5. Constant bounds over 20 seeds at 10^4 samples.
Outcome c5() {
  const GridSpec s = cube(2, -2.0, 2.0, 65);
  int violations = 0, runs = 0;
  double worst = 0.0;
  std::string where;
  auto track = [&](double ratio, const std::string& what) {
    if (ratio > worst) worst = ratio, where = what;
  };
  for (int seed = 0; seed < 20; ++seed) {
    const Jet j = nodal(s, oracle::random_jet(2, 5, 5000 + seed, 0.35));
    struct Case {
      Variant v;
      double alpha;
    };
    for (const Case c : {Case{Variant::general, 0.5}, Case{Variant::holder, 0.25}, Case{Variant::holder, 0.5},
                         Case{Variant::holder, 1.0}}) {
      const Modulus m = Modulus::holder(c.alpha);
      ExtendOptions opt;
      opt.variant = c.v;
      const ExtensionResult r = extend(j, m, s, opt);
      const VerificationReport rep = verify_extension(j, m, r, 10000, seed, sampled_only());
      const double A = r.A_computed, tol = rep.grid_tol, abs_tol = rep.abs_tol;
      const double a_bound = (c.v == Variant::general ? 2.0 : std::pow(2.0, 1.0 - c.alpha)) * A;
      const double aF = rep.value("A_F_sampled");
      ++runs;
      bool ok = aF <= a_bound * (1.0 + tol) + abs_tol;
      const std::string tag = "seed " + std::to_string(seed) + " " + to_string(c.v) + " a=" + fmt("%g", c.alpha);
      track(aF / a_bound, tag + " A(F,gradF)");
      if (c.v == Variant::holder) {
        const double a = c.alpha;
        const double cor = std::pow(2.0, 2.0 - 2.0 * a) / std::sqrt(1.0 + a) * std::pow(1.0 + 1.0 / a, a / 2.0);
        const double mw = rep.value("trace_upper");
        ok = ok && mw <= cor * A * (1.0 + tol) + abs_tol;
        track(mw / (cor * A), tag + " M_w(gradF)");
      }
      violations += !ok;
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.note = fmt("%.0f violations in %.0f builds, worst observed/bound %.4f", violations, runs, worst) + " (" + where + ")";
  return o;
}

// 6. Paraconvexity of F and -F for every variant.
Outcome c6() {
  const GridSpec s = cube(2, -2.0, 2.0, 65);
  const Jet j = nodal(s, oracle::smooth_jet(2, 5, 6000, 0.35));
  struct Case {
    Variant v;
    Modulus m;
  };
  const std::vector<Case> cases = {{Variant::general, Modulus::holder(0.5)}, {Variant::holder, Modulus::holder(0.5)},
                                   {Variant::c11, Modulus::linear(1.0)},     {Variant::bounded, Modulus::holder(0.5)},
                                   {Variant::lipschitz, Modulus::holder(0.5)}, {Variant::lp, Modulus::holder(0.5)}};
  Outcome o;
  std::ostringstream note;
  for (const Case& c : cases) {
    ExtendOptions opt;
    opt.variant = c.v;
    opt.p = 1.5;
    const ExtensionResult r = extend(j, c.m, s, opt);
    const VerificationReport rep = verify_extension(j, c.m, r, 10000, 6, sampled_only());
    const BoundCheck& a = rep.check("paraconvexity_F");
    const BoundCheck& b = rep.check("paraconvexity_minus_F");
    o.pass = o.pass && a.passed && b.passed;
    note << to_string(c.v) << " " << fmt("%.3f/%.3f", a.observed / a.bound, b.observed / b.bound) << "  ";
  }
  o.note = "observed/C for F and -F: " + note.str();
  return o;
}

// g on a line of nodes, written out from the formula.
std::vector<double> g_direct(const Jet& j, double M, const std::vector<double>& xs) {
  std::vector<double> out;
  for (double x : xs) {
    double best = 1e300;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const double d = x - j.points[i](0);
      best = std::min(best, j.values[i] + j.gradients[i](0) * d + 0.5 * M * d * d);
    }
    out.push_back(best);
  }
  return out;
}

// 7. 1-D grid envelope with C = M against the lower hull oracle.
Outcome c7() {
  const Modulus lin = Modulus::linear(1.0);
  const GridSpec s = cube(1, -3.0, 3.0, 601);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Jet j = nodal(s, oracle::random_jet(1, 2 + k % 5, 7000 + k, 0.3));
    const double M = std::max(compute_A(j, lin).constant, 1e-8);
    ExtendOptions opt;
    opt.M = M;
    opt.variant = Variant::c11;
    const ExtensionResult r = extend(j, lin, s, opt);
    const GridFunction F = paraconvex_envelope_grid(r.upper, r.lower, r.M_used, lin, r.stencil, r.eps);
    std::vector<double> xs;
    for (std::size_t i = 0; i < s.num_nodes(); ++i) xs.push_back(s.node(i)(0));
    const auto g = g_direct(j, r.M_used, xs);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = g[i] + 0.5 * r.M_used * xs[i] * xs[i];
    const auto hull = oracle::lower_hull_wrap(xs, ys);
    double scale = 1.0, err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      scale = std::max(scale, std::abs(g[i]));
      err = std::max(err, std::abs(F[i] - (hull[i] - 0.5 * r.M_used * xs[i] * xs[i])));
    }
    worst = std::max(worst, err / (default_grid_tol(r) * scale));
  }
  Outcome o;
  o.pass = worst <= 3.0;
  o.note = fmt("max node error / grid tolerance %.3g (limit 3)", worst);
  return o;
}

// 8. Bounded variant and continuity of the fixed-A operator.
Outcome c8() {
  const Modulus h = Modulus::holder(0.5);
  const GridSpec s = cube(2, -3.0, 3.0, 65);
  double worst_f = 0.0, worst_g = 0.0;
  bool ok = true;
  for (int k = 0; k < 20; ++k) {
    const Jet j = nodal(s, oracle::random_jet(2, 3 + k % 4, 8000 + k, 0.35));
    const ExtensionResult r = bounded_extend(j, h, s);
    const double K = j.sup_abs_value() + j.sup_grad_norm();
    const double supF = sup_abs(r.F.values);
    const double tol = default_grid_tol(r);
    // Gradient sup over interior nodes; the one-sided face stencils are excluded.
    double supG = 0.0;
    for (std::size_t i = 0; i < s.num_nodes(); ++i) {
      const Index ix = s.unflatten(i);
      if (ix[0] == 0 || ix[1] == 0 || ix[0] == s.shape[0] - 1 || ix[1] == s.shape[1] - 1) continue;
      supG = std::max(supG, r.grad_F[i].norm());
    }
    const double gb = 2.0 * supF + 2.0 * r.M_used * h.phi(1.0);
    ok = ok && supF <= 2.0 * K * (1.0 + 1e-12) && supG <= gb + tol * gb;
    worst_f = std::max(worst_f, supF / (2.0 * K));
    worst_g = std::max(worst_g, supG / gb);
  }
  // Perturbations start at 1% of the jet's sup norm and halve three times.
  bool cont_ok = true;
  std::string errs;
  for (int k = 0; k < 4; ++k) {
    const Jet cj = nodal(s, oracle::random_jet(2, 4, 8100 + k, 0.4));
    const double K = cj.sup_abs_value() + cj.sup_grad_norm();
    const VerificationReport cont = verify_continuity(cj, h, s, 3, 0.01 * K, 8 + k);
    const bool c = cont.check("continuity_F_decreasing").passed && cont.check("continuity_F_shrinks").passed;
    cont_ok = cont_ok && c;
    errs += fmt(" [%.3g %.3g", cont.value("error_F_0"), cont.value("error_F_1")) +
            fmt(" %.3g %.3g]", cont.value("error_F_2"), cont.value("error_F_3"));
  }
  Outcome o;
  o.pass = ok && cont_ok;
  o.note = fmt("sup|F|/2K %.3f, sup|grad F|/bound %.3f, continuity errors", worst_f, worst_g) + errs +
           (cont_ok ? " decreasing" : " NOT decreasing");
  return o;
}

// 9. Lipschitz variant.
Outcome c9() {
  const Modulus h = Modulus::holder(0.5);
  const GridSpec s = cube(2, -3.0, 3.0, 65);
  double worst = 0.0;
  bool ok = true;
  for (int k = 0; k < 20; ++k) {
    const Jet j = nodal(s, oracle::random_jet(2, 3 + k % 4, 9000 + k, 0.35));
    const ExtensionResult r = lipschitz_extend(j, h, s);
    const double L = j.sup_grad_norm() + h.omega(1.0) * r.diagnostic("M_tilde");
    // Sampled difference quotients: random node pairs plus every neighbour pair.
    CounterRng rng(9, static_cast<std::uint64_t>(k));
    double lip = 0.0;
    const std::size_t N = s.num_nodes();
    for (int i = 0; i < 10000; ++i) {
      const std::size_t a = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(N))) % N;
      const std::size_t b = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(N))) % N;
      if (a == b) continue;
      lip = std::max(lip, std::abs(r.F[a] - r.F[b]) / (s.node(a) - s.node(b)).norm());
    }
    for (std::size_t a = 0; a < N; ++a)
      for (int ax = 0; ax < 2; ++ax) {
        Index ix = s.unflatten(a);
        if (++ix[ax] >= s.shape[ax]) continue;
        const std::size_t b = s.flatten(ix);
        lip = std::max(lip, std::abs(r.F[a] - r.F[b]) / s.spacing(ax));
      }
    ok = ok && lip <= L * (1.0 + default_grid_tol(r));
    worst = std::max(worst, lip / L);
  }
  Outcome o;
  o.pass = ok;
  o.note = fmt("max sampled lip(F) / (|G| + w(1) M~) = %.4f", worst);
  return o;
}

// 10. Equivalence constants on 50 jets.
Outcome c10() {
  const Modulus h = Modulus::holder(0.5);
  int bad = 0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Jet j = oracle::random_jet(1 + k % 2, 2 + k % 4, 10000 + k);
    const CheckReport e = check_equivalences(j, h);
    const double MW = e.detail("M_W"), Mmg = e.detail("M_mg"), Mw = e.detail("M_omega_G");
    const bool ok = Mmg <= 4.0 * MW * (1.0 + 1e-3) && MW <= Mmg * (1.0 + 1e-3) && Mw <= 4.0 * MW * (1.0 + 1e-3);
    bad += !ok;
    r1 = std::max(r1, Mmg / (4.0 * MW));
    r2 = std::max(r2, MW / Mmg);
    r3 = std::max(r3, Mw / (4.0 * MW));
  }
  Outcome o;
  o.pass = bad == 0;
  o.note = fmt("max M_mg/4M_W %.3f, M_W/M_mg %.3f, ", r1, r2) + fmt("M_w(G)/4M_W %.3f", r3);
  return o;
}

// 11. A(F, grad F) / A(f, G) from n = 1 to n = 3.
Outcome c11() {
  const Modulus h = Modulus::holder(0.5);
  double mean[2] = {0.0, 0.0};
  const int dims[2] = {1, 3};
  const int seeds = 5;
  for (int d = 0; d < 2; ++d) {
    const int n = dims[d];
    const GridSpec s = n == 1 ? cube(1, -2.5, 2.5, 257) : cube(3, -2.5, 2.5, 33);
    for (int k = 0; k < seeds; ++k) {
      const Jet j = nodal(s, oracle::smooth_jet(n, 4, 11000 + k, 0.5));
      const ExtensionResult r = extend(j, h, s);
      const VerificationReport rep = verify_extension(j, h, r, 10000, k, sampled_only());
      mean[d] += rep.value("A_F_sampled") / r.A_computed / seeds;
    }
  }
  Outcome o;
  o.pass = mean[1] <= 1.1 * mean[0];
  o.note = fmt("mean ratio n=1 %.4f, n=3 %.4f, growth %.3f", mean[0], mean[1], mean[1] / mean[0]);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
      {"golden example", c1},       {"modulus identities", c2},      {"Wells equivalence", c3},
      {"interpolation", c4},        {"constant bounds", c5},         {"paraconvexity of F and -F", c6},
      {"1-D hull oracle", c7},      {"bounded variant", c8},         {"Lipschitz variant", c9},
      {"equivalence constants", c10}, {"dimension-free ratio", c11}};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %-28s %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", all[k].first, o.note.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
