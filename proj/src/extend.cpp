#include <jetx/envelope.hpp>
#include <jetx/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetx {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::general:
      return "general";
    case Variant::holder:
      return "holder";
    case Variant::c11:
      return "c11";
    case Variant::bounded:
      return "bounded";
    case Variant::lipschitz:
      return "lipschitz";
    case Variant::lp:
      return "lp";
  }
  return "general";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::general, Variant::holder, Variant::c11, Variant::bounded, Variant::lipschitz,
                    Variant::lp}) {
    if (to_string(v) == s) return v;
  }
  throw SchemaError("unknown variant '" + s + "'");
}

double ExtensionResult::diagnostic(const std::string& name) const {
  for (const auto& [k, v] : diagnostics)
    if (k == name) return v;
  throw Error("extension has no diagnostic named " + name);
}

namespace {

constexpr double kMinM = 1e-8;
constexpr double kMaxM = 1e8;
// The envelope runs on the box grown by this fraction of its width per side
// and is cropped back. Near the faces of a box the envelope misses the
// constraints from outside and overshoots the whole-space one.
constexpr double kPadFraction = 0.25;

struct Caps {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

std::vector<std::size_t> snap_points(const Jet& jet, const GridSpec& grid) {
  if (jet.dim != grid.dim) throw GridError("grid dimension differs from jet dimension");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < jet.size(); ++i) {
    const long long node = grid.nearest(jet.points[i]);
    if (node < 0) {
      std::ostringstream os;
      os << "point off-grid: E point " << i << " lies outside the grid box";
      throw GridError(os.str());
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k] == static_cast<std::size_t>(node)) {
        std::ostringstream os;
        os << "E points " << k << " and " << i << " snap to the same grid node; refine the grid";
        throw GridError(os.str());
      }
    }
    out.push_back(static_cast<std::size_t>(node));
  }
  return out;
}

void fill_bounds(ExtensionResult& r, const Jet& jet, double M, const Caps& caps) {
  const GridSpec& s = r.F.spec;
  r.lower = GridFunction(s, r.norm);
  r.upper = GridFunction(s, r.norm);
  parallel_for(s.num_nodes(), [&](std::size_t i) {
    const Vec x = s.node(i);
    r.lower[i] = std::max(caps.lo, eval_m(jet, r.modulus_used, M, x, r.norm));
    r.upper[i] = std::min(caps.hi, eval_g(jet, r.modulus_used, M, x, r.norm));
  });
}

double max_gap(const ExtensionResult& r, double& scale) {
  double gap = -std::numeric_limits<double>::infinity();
  scale = 1.0;
  for (std::size_t i = 0; i < r.lower.values.size(); ++i) {
    gap = std::max(gap, r.lower[i] - r.upper[i]);
    scale = std::max({scale, std::abs(r.lower[i]), std::abs(r.upper[i])});
  }
  return gap;
}

// Fills m and g; raises M when a (slightly underestimated) A leaves m > g
// at some node. Returns the M finally used.
double consistent_bounds(ExtensionResult& r, const Jet& jet, double M, const Caps& caps) {
  auto gap_at = [&](double MM) {
    fill_bounds(r, jet, MM, caps);
    double scale;
    const double g = max_gap(r, scale);
    return g > 1e-12 * scale;
  };
  if (!gap_at(M)) return M;
  double lo = M, hi = M;
  do {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxM) throw NotExtendable("m exceeds g on the grid for every M up to 1e8");
  } while (gap_at(hi));
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap_at(mid) ? lo : hi) = mid;
  }
  gap_at(hi);
  r.diagnostics.emplace_back("M_grid_bump_factor", hi / M);
  return hi;
}

GridSpec padded(const GridSpec& g, Index& offset) {
  GridSpec p = g;
  for (int a = 0; a < g.dim; ++a) {
    const int k = static_cast<int>(std::ceil(kPadFraction * (g.shape[a] - 1)));
    const double h = g.spacing(a);
    offset[a] = k;
    p.lo[a] = g.lo[a] - k * h;
    p.hi[a] = g.hi[a] + k * h;
    p.shape[a] = g.shape[a] + 2 * k;
  }
  return p;
}

// Restricts F, grad F, m and g from the work grid to the requested box.
void crop(ExtensionResult& r) {
  const GridSpec& w = r.work_grid;
  GridSpec g = w;
  for (int a = 0; a < w.dim; ++a) {
    const int k = r.work_offset[a];
    g.shape[a] = w.shape[a] - 2 * k;
    g.lo[a] = w.lo[a] + k * w.spacing(a);
    g.hi[a] = w.hi[a] - k * w.spacing(a);
  }
  GridFunction F(g, r.norm), lo(g, r.norm), up(g, r.norm);
  std::vector<Vec> grad(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    Index ix = g.unflatten(i);
    for (int a = 0; a < g.dim; ++a) ix[a] += r.work_offset[a];
    const std::size_t j = w.flatten(ix);
    F[i] = r.F[j];
    lo[i] = r.lower[j];
    up[i] = r.upper[j];
    grad[i] = r.grad_F[j];
  }
  r.F = std::move(F);
  r.lower = std::move(lo);
  r.upper = std::move(up);
  r.grad_F = std::move(grad);
}

void run_envelope(ExtensionResult& r, const GridFunction& u0, double C, double lip_cap = std::numeric_limits<double>::infinity()) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < u0.values.size(); ++i) {
    hi = std::max(hi, r.upper[i]);
    lo = std::min(lo, r.lower[i]);
  }
  const double range = hi - lo;
  r.eps = range > 0.0 ? 1e-9 * range : 1e-15;
  EnvelopeStats st;
  r.F = paraconvex_envelope_grid(u0, r.lower, C, r.modulus_used, r.stencil, r.eps, &st, lip_cap);
  r.C_used = C;
  r.iterations = st.rounds;
  r.residual = st.residual;
  r.grad_F = grid_gradient(r.F);
  crop(r);
  r.diagnostics.emplace_back("line_updates", static_cast<double>(st.line_updates));
  r.diagnostics.emplace_back("changed_nodes", static_cast<double>(st.changed));
}

ExtensionResult start(const Jet& jet, const Modulus& phi_mod, const GridSpec& grid, const NormMode& norm,
                      const DirectionSet& stencil, Variant v) {
  jet.validate();
  ExtensionResult r;
  r.variant = v;
  r.modulus_used = phi_mod;
  r.norm = norm;
  r.stencil = stencil.empty() ? default_stencil(grid.dim) : stencil;
  r.snapped = snap_points(jet, grid);
  r.work_grid = padded(grid, r.work_offset);
  r.F = GridFunction(r.work_grid, norm);
  return r;
}

double resolve_A(const Jet& jet, const Modulus& m, const ExtendOptions& opt) {
  const double A = opt.A >= 0.0 ? opt.A : compute_A(jet, m, opt.search).constant;
  if (!std::isfinite(A) || A > kMaxM) {
    std::ostringstream os;
    os << "not extendable: A(f,G) = " << A << " exceeds the admissible bracket";
    throw NotExtendable(os.str());
  }
  return A;
}

double resolve_M(double A, double requested) {
  if (requested > 0.0) {
    if (requested < A * (1.0 - 1e-6)) {
      std::ostringstream os;
      os << "supplied M = " << requested << " is below A(f,G) = " << A;
      throw SchemaError(os.str());
    }
    return requested;
  }
  return std::max(A, kMinM);
}

// t^alpha / w(t) must be nondecreasing for the lp construction.
void require_lp_compatible(const Modulus& m, double alpha) {
  double prev = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double t = std::pow(10.0, k / 10.0);
    const double q = std::pow(t, alpha) / m.omega(t);
    if (q < prev * (1.0 - 1e-9)) {
      throw SchemaError("lp variant needs t^(p-1)/omega(t) nondecreasing; choose a smaller exponent or larger p");
    }
    prev = q;
  }
}

}  // namespace

double lp_paraconvexity_constant(double p, double smoothness) {
  const double a = p - 1.0;
  return 1.0 + std::pow(3.0, 1.0 + a) / (1.0 + a) * smoothness;
}

ExtensionResult extend(const Jet& jet, const Modulus& m, const GridSpec& grid, const ExtendOptions& opt) {
  switch (opt.variant) {
    case Variant::bounded:
      return bounded_extend(jet, m, grid, opt);
    case Variant::lipschitz:
      return lipschitz_extend(jet, m, grid, opt);
    case Variant::c11: {
      if (!(m.kind() == Modulus::Kind::linear ||
            (m.kind() == Modulus::Kind::holder && m.exponent() == 1.0))) {
        throw SchemaError("c11 variant requires a linear modulus");
      }
      jet.validate();
      const double A = resolve_A(jet, m, opt);
      ExtensionResult r = extend_c11_biconjugate(jet, resolve_M(A, opt.M), grid, m);
      r.A_computed = A;
      return r;
    }
    default:
      break;
  }

  NormMode norm;
  if (opt.variant == Variant::lp) norm = NormMode::lp(opt.p);
  if (opt.variant == Variant::holder && !m.is_power_law()) {
    throw SchemaError("holder variant requires a holder or linear modulus");
  }
  // Euclidean A suffices in lp mode: |.|_p >= |.|_2 for p <= 2 and phi increases.
  jet.validate();
  const double A = resolve_A(jet, m, opt);
  ExtensionResult r = start(jet, m, grid, norm, opt.stencil, opt.variant);
  r.A_computed = A;
  double M = resolve_M(A, opt.M);

  double factor = 2.0;
  if (opt.variant == Variant::holder) {
    factor = std::pow(2.0, 1.0 - m.exponent());
  } else if (opt.variant == Variant::lp) {
    require_lp_compatible(m, opt.p - 1.0);
    const double c = lp_smoothness_constant(opt.p, jet.dim, opt.lp_samples, opt.seed);
    factor = lp_paraconvexity_constant(opt.p, c);
    r.diagnostics.emplace_back("lp_smoothness", c);
    r.diagnostics.emplace_back("C_star", factor);
  }
  M = consistent_bounds(r, jet, M, {});
  r.M_used = M;
  run_envelope(r, r.upper, factor * M);
  return r;
}

ExtensionResult extend_c11_biconjugate(const Jet& jet, double M, const GridSpec& grid, const Modulus& m) {
  if (!(M > 0.0)) throw DomainError("c11 extension needs M > 0");
  double slope = 1.0;
  if (m.kind() == Modulus::Kind::linear) {
    slope = m.omega(1.0);
  } else if (!(m.kind() == Modulus::Kind::holder && m.exponent() == 1.0)) {
    throw SchemaError("c11 variant requires a linear modulus");
  }
  ExtensionResult r = start(jet, m, grid, {}, {}, Variant::c11);
  M = consistent_bounds(r, jet, M, {});
  r.M_used = M;
  const double k = M * slope;  // M phi(t) = (k/2) t^2
  const GridSpec s = r.work_grid;
  const std::size_t N = s.num_nodes();

  std::vector<double> psi(N);
  GridFunction v(s);
  for (std::size_t i = 0; i < N; ++i) {
    psi[i] = 0.5 * k * s.node(i).squaredNorm();
    v[i] = r.upper[i] + psi[i];
  }
  for (int a = 0; a < s.dim; ++a) {
    Direction d{0, 0, 0, 0};
    d[a] = 1;
    const auto lines = lattice_lines(s, d);
    parallel_for(lines.size(), [&](std::size_t l) {
      const auto& line = lines[l];
      std::vector<double> xs(line.size()), ys(line.size());
      for (std::size_t i = 0; i < line.size(); ++i) {
        xs[i] = s.node(line[i])(a);
        ys[i] = v[line[i]];
      }
      const auto hull = lower_hull_1d(xs, ys);
      for (std::size_t i = 0; i < line.size(); ++i) v[line[i]] = hull[i];
    });
  }
  GridFunction u1(s);
  for (std::size_t i = 0; i < N; ++i) u1[i] = std::max(v[i] - psi[i], r.lower[i]);
  // Exact in 1-D; in higher dimensions the separable passes only bound the
  // convex envelope from above, so the C = M envelope finishes the job.
  run_envelope(r, u1, M);
  return r;
}

ExtensionResult bounded_extend(const Jet& jet, const Modulus& m, const GridSpec& grid, const ExtendOptions& opt) {
  jet.validate();
  const double A = resolve_A(jet, m, opt);
  ExtensionResult r = start(jet, m, grid, {}, opt.stencil, Variant::bounded);
  const double K = jet.sup_abs_value() + jet.sup_grad_norm();
  r.A_computed = A;
  double M = std::max({3.0 * K / m.phi(1.0), A, kMinM});
  if (opt.M > 0.0) M = std::max(M, resolve_M(A, opt.M));
  const Caps caps{-2.0 * K, 2.0 * K};
  M = consistent_bounds(r, jet, M, caps);
  r.M_used = M;
  r.diagnostics.emplace_back("K", K);
  r.diagnostics.emplace_back("rho", K + A);
  run_envelope(r, r.upper, 2.0 * M);
  return r;
}

ExtensionResult continuity_extend(const Jet& jet, const Modulus& m, const GridSpec& grid, double A,
                                  const DirectionSet& stencil) {
  if (!(A >= 0.0)) throw DomainError("continuity operator needs A >= 0");
  ExtensionResult r = start(jet, m, grid, {}, stencil, Variant::bounded);
  const double K = jet.sup_abs_value() + jet.sup_grad_norm();
  double M = std::max(3.0 * K / m.phi(1.0) + A, kMinM);
  const Caps caps{-2.0 * K, 2.0 * K};
  fill_bounds(r, jet, M, caps);
  double scale;
  if (max_gap(r, scale) > 1e-12 * scale) {
    throw Error("continuity operator: A is below A(f,G) for this jet");
  }
  r.M_used = M;
  r.A_computed = A;
  r.diagnostics.emplace_back("K", K);
  run_envelope(r, r.upper, 2.0 * M);
  return r;
}

ExtensionResult lipschitz_extend(const Jet& jet, const Modulus& m, const GridSpec& grid, const ExtendOptions& opt) {
  const Modulus capped = Modulus::capped(m, 1.0);
  jet.validate();
  const double A = resolve_A(jet, m, opt);
  ExtensionResult r = start(jet, capped, grid, {}, opt.stencil, Variant::lipschitz);
  r.A_computed = A;
  const double lip = jet.lipschitz_constant();
  const double Gsup = jet.sup_grad_norm();
  double Mt = std::max({resolve_M(A, opt.M), 2.0 * (lip + Gsup) / m.phi(1.0)});
  Mt = consistent_bounds(r, jet, Mt, {});
  r.M_used = Mt;
  // -phi~(|.|) is (2a + 4) phi~-paraconvex with a = 16/sqrt(15), the gradient
  // modulus constant of phi(|.|).
  const double a = 16.0 / std::sqrt(15.0);
  const double C = (2.0 * a + 4.0) * Mt;
  r.lipschitz_cap = Gsup + m.omega(1.0) * Mt;
  r.diagnostics.emplace_back("lip_f", lip);
  r.diagnostics.emplace_back("M_tilde", Mt);
  r.diagnostics.emplace_back("L", r.lipschitz_cap);
  run_envelope(r, r.upper, C, r.lipschitz_cap);
  return r;
}

}  // namespace jetx
