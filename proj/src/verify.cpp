#include <jetx/parallel.hpp>
#include <jetx/random.hpp>
#include <jetx/verify.hpp>

#include <algorithm>
#include <cmath>

namespace jetx {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

bool VerificationReport::has_check(const std::string& name) const {
  return std::any_of(checks.begin(), checks.end(), [&](const BoundCheck& c) { return c.name == name; });
}

const BoundCheck& VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error("report has no check named " + name);
}

double VerificationReport::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw Error("report has no value named " + name);
}

BoundCheck& VerificationReport::add(BoundCheck c) {
  if (std::isnan(c.observed)) {
    c.passed = false;
  } else if (c.sense == BoundCheck::Sense::at_most) {
    c.passed = c.observed <= c.bound * (1.0 + c.rel_tol) + c.abs_tol;
  } else {
    c.passed = c.observed >= c.bound * (1.0 - c.rel_tol) - c.abs_tol;
  }
  checks.push_back(std::move(c));
  return checks.back();
}

double default_grid_tol(const ExtensionResult& ext) {
  const Modulus& m = ext.modulus_used;
  return 10.0 * m.omega(ext.F.spec.max_spacing()) / m.omega(ext.F.spec.diameter());
}

namespace {

bool is_lp(const ExtensionResult& ext) { return ext.norm.kind == NormKind::lp && ext.norm.p != 2.0; }

double holder_factor(double a) {
  return std::pow(2.0, 1.0 - a) / std::sqrt(1.0 + a) * std::pow(1.0 + 1.0 / a, a / 2.0);
}

double dual_norm(const NormMode& norm, const Vec& v) {
  if (norm.kind == NormKind::euclidean || norm.p == 2.0) return v.norm();
  const double q = norm.p / (norm.p - 1.0);
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), q);
  return std::pow(s, 1.0 / q);
}

// Denominator w such that |grad F(x) - grad F(y)| <= C * w is the claimed bound.
double gradient_bound_unit(const ExtensionResult& ext, double d) {
  const Modulus& m = ext.modulus_used;
  if (is_lp(ext)) return 3.0 * m.omega(d);
  if (m.is_power_law()) return holder_factor(m.exponent()) * m.omega(d);
  return std::min(8.0 / std::sqrt(15.0) * m.omega(d), 4.0 / std::sqrt(3.0) * m.omega(0.5 * d));
}

// Bound on the dual norm of (central difference - grad F) at a node when F
// and -F are C phi-paraconvex: each component is off by at most C phi(h)/h.
double fd_gradient_error(const ExtensionResult& ext) {
  const GridSpec& s = ext.F.spec;
  double e = 0.0;
  for (int a = 0; a < s.dim; ++a) e = std::max(e, ext.modulus_used.phi(s.spacing(a)) / s.spacing(a));
  const double q = is_lp(ext) ? ext.norm.p / (ext.norm.p - 1.0) : 2.0;
  return std::pow(static_cast<double>(s.dim), 1.0 / q) * ext.C_used * e;
}

bool in_margin(const GridSpec& s, const Index& ix, int margin) {
  for (int a = 0; a < s.dim; ++a)
    if (ix[a] < margin || ix[a] > s.shape[a] - 1 - margin) return false;
  return true;
}

Index random_node(const GridSpec& s, CounterRng& rng) {
  Index ix{0, 0, 0, 0};
  for (int a = 0; a < s.dim; ++a) ix[a] = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.shape[a])));
  return ix;
}

Index clamp_index(const GridSpec& s, Index ix, int margin = 0) {
  for (int a = 0; a < s.dim; ++a) ix[a] = std::clamp(ix[a], margin, s.shape[a] - 1 - margin);
  return ix;
}

// Samples that use grad F, or the concavity bound of F, stay this many cells
// away from the box: the outer layers see only part of the stencil and grad F
// is one-sided there.
constexpr int kGradMargin = 4;

Index interior_node(const GridSpec& s, CounterRng& rng) {
  Index ix{0, 0, 0, 0};
  for (int a = 0; a < s.dim; ++a) {
    const int room = s.shape[a] - 2 * kGradMargin;
    ix[a] = room > 0 ? kGradMargin + static_cast<int>(rng.below(static_cast<std::uint64_t>(room)))
                     : s.shape[a] / 2;
  }
  return ix;
}

Index offset(const GridSpec& s, const Index& base, CounterRng& rng, int radius, int margin = 0) {
  Index ix = base;
  for (int a = 0; a < s.dim; ++a) ix[a] += static_cast<int>(rng.below(2 * radius + 1)) - radius;
  return clamp_index(s, ix, margin);
}

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Vec> witness;
};

// Deterministic reduction of per-sample results.
Worst reduce(const std::vector<double>& val, const std::vector<std::vector<Vec>>& wit) {
  Worst w;
  for (std::size_t i = 0; i < val.size(); ++i) {
    if (val[i] > w.value || std::isnan(val[i])) {
      w.value = val[i];
      w.witness = wit[i];
      if (std::isnan(val[i])) break;
    }
  }
  return w;
}

// Sampled max of |grad F(x) - grad F(y)| / unit(|x - y|) over random pairs,
// multi-scale axis neighbours and E-node pairs.
// plain: denominator w(d) instead of the claimed bound unit.
Worst sample_gradient_modulus(const ExtensionResult& ext, long samples, std::uint64_t seed, bool plain = false) {
  const GridSpec& s = ext.F.spec;
  std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
  std::vector<std::vector<Vec>> wit(val.size());
  const double fd = fd_gradient_error(ext);
  parallel_for(val.size(), [&](std::size_t i) {
    CounterRng rng(seed, i);
    Index a = interior_node(s, rng), b;
    switch (i % 3) {
      case 0:
        b = interior_node(s, rng);
        break;
      case 1: {
        b = a;
        const int axis = static_cast<int>(rng.below(s.dim));
        const int maxk = std::max(1, static_cast<int>(std::log2(static_cast<double>(s.shape[axis]))));
        const int step = 1 << rng.below(maxk);
        b[axis] += rng.below(2) ? step : -step;
        b = clamp_index(s, b, kGradMargin);
        break;
      }
      default: {
        b = offset(s, a, rng, 4, kGradMargin);
        if (ext.snapped.size() >= 2) {
          const Index p = s.unflatten(ext.snapped[rng.below(ext.snapped.size())]);
          const Index q = s.unflatten(ext.snapped[rng.below(ext.snapped.size())]);
          if (in_margin(s, p, kGradMargin) && in_margin(s, q, kGradMargin)) a = p, b = q;
        }
      }
    }
    const std::size_t ia = s.flatten(a), ib = s.flatten(b);
    if (ia == ib) return;
    const Vec xa = s.node(ia), xb = s.node(ib);
    const double d = ext.norm.norm(xa - xb);
    const double den = plain ? ext.modulus_used.omega(d) : gradient_bound_unit(ext, d);
    val[i] = std::max(0.0, dual_norm(ext.norm, ext.grad_F[ia] - ext.grad_F[ib]) - 2.0 * fd) / den;
    wit[i] = {xa, xb};
  });
  return reduce(val, wit);
}

// Sampled A(F, grad F) over node triples at global and local scales.
Worst sample_A(const ExtensionResult& ext, long samples, std::uint64_t seed) {
  const GridSpec& s = ext.F.spec;
  const Modulus& m = ext.modulus_used;
  std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
  std::vector<std::vector<Vec>> wit(val.size());
  const double fd = fd_gradient_error(ext);
  parallel_for(val.size(), [&](std::size_t i) {
    CounterRng rng(seed ^ 0xa5a5a5a5ULL, i);
    Index y = interior_node(s, rng), z, x;
    switch (i % 3) {
      case 0:
        z = interior_node(s, rng);
        x = random_node(s, rng);
        break;
      case 1: {
        const int r = 1 + static_cast<int>(rng.below(8));
        z = offset(s, y, rng, r, kGradMargin);
        x = offset(s, y, rng, 2 * r);
        break;
      }
      default:
        if (!ext.snapped.empty()) {
          const Index e = s.unflatten(ext.snapped[rng.below(ext.snapped.size())]);
          if (in_margin(s, e, kGradMargin)) y = e;
        }
        z = interior_node(s, rng);
        x = offset(s, z, rng, 1 + static_cast<int>(rng.below(s.shape[0] / 4 + 1)));
    }
    const std::size_t iy = s.flatten(y), iz = s.flatten(z), ix = s.flatten(x);
    const Vec py = s.node(iy), pz = s.node(iz), px = s.node(ix);
    const double dy = ext.norm.norm(px - py), dz = ext.norm.norm(px - pz);
    const double den = m.phi(dy) + m.phi(dz);
    if (!(den > 0.0)) return;
    const double num = ext.F[iy] + ext.grad_F[iy].dot(px - py) - ext.F[iz] - ext.grad_F[iz].dot(px - pz);
    val[i] = std::max(0.0, std::abs(num) - fd * (dy + dz)) / den;
    wit[i] = {px, py, pz};
  });
  return reduce(val, wit);
}

// Needed paraconvexity constant for sign * F over random stencil triples.
Worst sample_paraconvexity(const ExtensionResult& ext, double sign, long samples, std::uint64_t seed,
                           double slack) {
  const GridSpec& s = ext.F.spec;
  const Modulus& m = ext.modulus_used;
  std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
  std::vector<std::vector<Vec>> wit(val.size());
  parallel_for(val.size(), [&](std::size_t i) {
    CounterRng rng(seed ^ (sign > 0 ? 0x1111ULL : 0x2222ULL), i);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Index x = sign > 0.0 ? random_node(s, rng) : interior_node(s, rng);
      const Direction& d = ext.stencil[rng.below(ext.stencil.size())];
      // -F triples stay inside the margin end to end.
      auto steps = [&](int dir) {
        int k = 0;
        Index y = x;
        while (true) {
          for (int a = 0; a < s.dim; ++a) y[a] += dir * d[a];
          if (!s.inside(y) || (sign < 0.0 && !in_margin(s, y, kGradMargin))) return k;
          ++k;
        }
      };
      const int kf = steps(1), kb = steps(-1);
      if (kf == 0 || kb == 0) continue;
      const bool small = rng.below(2) == 0;
      const int st = 1 + static_cast<int>(rng.below(small ? std::min(kf, 3) : kf));
      const int tt = 1 + static_cast<int>(rng.below(small ? std::min(kb, 3) : kb));
      Index xp = x, xm = x;
      for (int a = 0; a < s.dim; ++a) {
        xp[a] += st * d[a];
        xm[a] -= tt * d[a];
      }
      const double S = st, T = tt;
      const double u = sign * ext.F.at(x), up = sign * ext.F.at(xp), um = sign * ext.F.at(xm);
      const double lhs = u - (T / (S + T) * up + S / (S + T) * um);
      const double w = S * T / ((S + T) * (S + T)) * m.phi((S + T) * direction_length(s, d, ext.norm));
      val[i] = (lhs - slack) / w;
      wit[i] = {s.node(xm), s.node(x), s.node(xp)};
      return;
    }
  });
  Worst w = reduce(val, wit);
  w.value = std::max(w.value, 0.0);
  return w;
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

double gradient_modulus_factor(const ExtensionResult& ext) {
  if (is_lp(ext)) return 3.0;
  if (ext.modulus_used.is_power_law()) return holder_factor(ext.modulus_used.exponent());
  return 8.0 / std::sqrt(15.0);
}

VerificationReport verify_prop26(const ExtensionResult& ext, const Modulus& /*m*/, long samples,
                                 std::uint64_t seed) {
  VerificationReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.grid_tol = default_grid_tol(ext);
  const Worst w = sample_gradient_modulus(ext, samples, seed);
  BoundCheck c;
  c.name = "gradient_modulus";
  c.bound = ext.C_used;
  c.observed = w.value;
  c.rel_tol = rep.grid_tol;
  c.abs_tol = rep.abs_tol;
  c.witness = w.witness;
  rep.add(c);
  rep.values.emplace_back("gradient_modulus_factor", gradient_modulus_factor(ext));
  rep.values.emplace_back("M_omega_gradF_sampled", sample_gradient_modulus(ext, samples, seed, true).value);
  return rep;
}

VerificationReport verify_extension(const Jet& jet, const Modulus& m, const ExtensionResult& ext, long samples,
                                    std::uint64_t seed, const VerifyOptions& opt) {
  (void)m;
  VerificationReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.grid_tol = opt.grid_tol >= 0.0 ? opt.grid_tol : default_grid_tol(ext);
  const double gt = rep.grid_tol;
  const GridSpec& s = ext.F.spec;
  const std::size_t N = s.num_nodes();
  const Modulus& mu = ext.modulus_used;
  const double scale = std::max({1.0, sup_abs(ext.F.values), sup_abs(ext.upper.values), sup_abs(ext.lower.values)});
  const double fabs = std::max(rep.abs_tol * scale, 4.0 * ext.eps);

  auto make = [&](const std::string& name, double bound, double observed, double rel, double abs,
                  BoundCheck::Sense sense = BoundCheck::Sense::at_most, std::vector<Vec> wit = {}) {
    BoundCheck c;
    c.name = name;
    c.bound = bound;
    c.observed = observed;
    c.rel_tol = rel;
    c.abs_tol = abs;
    c.sense = sense;
    c.witness = std::move(wit);
    rep.add(c);
  };

  // m <= F <= g
  {
    double lo = -std::numeric_limits<double>::infinity(), hi = lo;
    std::size_t wl = 0, wh = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (ext.lower[i] - ext.F[i] > lo) lo = ext.lower[i] - ext.F[i], wl = i;
      if (ext.F[i] - ext.upper[i] > hi) hi = ext.F[i] - ext.upper[i], wh = i;
    }
    make("sandwich_lower", 0.0, lo, 0.0, fabs, BoundCheck::Sense::at_most, {s.node(wl)});
    make("sandwich_upper", 0.0, hi, 0.0, fabs, BoundCheck::Sense::at_most, {s.node(wh)});
  }

  // Interpolation at snapped nodes.
  {
    const double h = s.max_spacing();
    const double K = 10.0 * std::max(1.0, ext.C_used / (2.0 * ext.M_used));
    double val = -std::numeric_limits<double>::infinity(), grad = val;
    std::vector<Vec> wv, wg;
    for (std::size_t i = 0; i < jet.size(); ++i) {
      const std::size_t node = ext.snapped[i];
      const Vec x = s.node(node);
      const Vec dx = x - jet.points[i];
      const double delta = ext.norm.norm(dx);
      const double ev = std::abs(ext.F[node] - jet.values[i] - jet.gradients[i].dot(dx)) - ext.M_used * mu.phi(delta);
      if (ev > val) val = ev, wv = {jet.points[i]};
      const double eg = (ext.grad_F[node] - jet.gradients[i]).norm() - 3.0 * ext.C_used * mu.omega(delta);
      if (eg > grad) grad = eg, wg = {jet.points[i]};
    }
    make("interpolation_value", 0.0, val, 0.0, fabs, BoundCheck::Sense::at_most, wv);
    make("interpolation_gradient", K * ext.M_used * mu.omega(h), grad, 0.0, rep.abs_tol, BoundCheck::Sense::at_most, wg);
  }

  // Discrete paraconvexity of F and -F.
  {
    const Worst wp = sample_paraconvexity(ext, 1.0, samples, seed, fabs);
    make("paraconvexity_F", ext.C_used, wp.value, gt, rep.abs_tol, BoundCheck::Sense::at_most, wp.witness);
    const Worst wm = sample_paraconvexity(ext, -1.0, samples, seed, fabs);
    make("paraconvexity_minus_F", ext.C_used, wm.value, gt, rep.abs_tol, BoundCheck::Sense::at_most, wm.witness);
  }

  // Maximality: one more Jacobi sweep moves nothing.
  {
    const double res = envelope_residual(ext.F, ext.lower, ext.C_used, mu, ext.stencil);
    make("maximality", ext.eps, res, 0.0, 0.0);
  }

  if (opt.rebuild_check) {
    const GridFunction F2 = paraconvex_envelope_grid(ext.upper, ext.lower, 1.1 * ext.C_used, mu, ext.stencil,
                                                     ext.eps, nullptr, ext.lipschitz_cap);
    double worst = std::numeric_limits<double>::infinity();
    std::size_t wi = 0;
    for (std::size_t i = 0; i < N; ++i)
      if (F2[i] - ext.F[i] < worst) worst = F2[i] - ext.F[i], wi = i;
    make("monotone_in_C", 0.0, worst, 0.0, 2.0 * ext.eps, BoundCheck::Sense::at_least, {s.node(wi)});
  }

  const bool plain = ext.variant == Variant::general || ext.variant == Variant::holder || ext.variant == Variant::c11;
  if (plain && opt.family_points > 0) {
    FamilyBudget budget;
    budget.knots = 2;
    budget.iterations = 150;
    budget.max_starts = 2;
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<Vec> wit;
    for (int k = 0; k < opt.family_points; ++k) {
      CounterRng rng(seed ^ 0xfa111eULL, static_cast<std::uint64_t>(k));
      const std::size_t node = s.flatten(random_node(s, rng));
      const Vec x = s.node(node);
      const double lb = family_F_lower_bound(jet, mu, ext.M_used, x, ext.work_grid.num_nodes() > s.num_nodes() ? ext.work_grid : s, budget);
      if (lb - ext.F[node] > worst) worst = lb - ext.F[node], wit = {x};
    }
    make("family_dominance", 0.0, worst, 0.0, fabs, BoundCheck::Sense::at_most, wit);
  }

  // Sampled constants.
  const Worst wa = sample_A(ext, samples, seed);
  rep.values.emplace_back("A_F_sampled", wa.value);
  make("A_F_le_C", ext.C_used, wa.value, gt, rep.abs_tol, BoundCheck::Sense::at_most, wa.witness);

  const Worst wg = sample_gradient_modulus(ext, samples, seed);
  const double factor = gradient_modulus_factor(ext);
  rep.values.emplace_back("gradient_modulus_factor", factor);
  make("gradient_modulus", ext.C_used, wg.value, gt, rep.abs_tol, BoundCheck::Sense::at_most, wg.witness);

  // Trace seminorm bracket: A(f,G) <= |(f,G)| <= M_w(grad F).
  {
    const double upper = sample_gradient_modulus(ext, samples, seed, true).value;
    rep.values.emplace_back("trace_lower", ext.A_computed);
    rep.values.emplace_back("trace_upper", upper);
    if (!is_lp(ext)) make("trace_bracket_order", ext.A_computed, upper, gt, rep.abs_tol, BoundCheck::Sense::at_least);
    if (plain) {
      // holder: 2^{1-a} times the Hoelder factor; c11: M itself; general: 16/sqrt(15) M.
      double ref = 16.0 / std::sqrt(15.0);
      if (ext.variant == Variant::c11) ref = 1.0;
      if (ext.variant == Variant::holder) ref = std::pow(2.0, 1.0 - mu.exponent()) * holder_factor(mu.exponent());
      make("trace_bracket_upper", ref * ext.M_used, upper, gt, rep.abs_tol);
    }
  }

  if (ext.variant == Variant::bounded) {
    const double K = ext.diagnostic("K");
    const double supF = sup_abs(ext.F.values);
    double supG = 0.0;
    for (const Vec& g : ext.grad_F) supG = std::max(supG, g.norm());
    rep.values.emplace_back("sup_F", supF);
    rep.values.emplace_back("sup_gradF", supG);
    make("sup_F", 2.0 * K, supF, 0.0, fabs);
    make("sup_gradF", 2.0 * supF + 2.0 * ext.M_used * mu.phi(1.0), supG, 0.0, gt);
  }
  if (std::isfinite(ext.lipschitz_cap)) {
    std::vector<double> val(static_cast<std::size_t>(samples), 0.0);
    parallel_for(val.size(), [&](std::size_t i) {
      CounterRng rng(seed ^ 0x11b5ULL, i);
      const Index a = random_node(s, rng);
      const Index b = i % 2 ? random_node(s, rng) : offset(s, a, rng, 1 + static_cast<int>(rng.below(4)));
      const Vec xa = s.node(a), xb = s.node(b);
      const double d = (xa - xb).norm();
      if (d > 0.0) val[i] = std::abs(ext.F.at(a) - ext.F.at(b)) / d;
    });
    double lip = 0.0;
    for (double v : val) lip = std::max(lip, v);
    rep.values.emplace_back("lip_F", lip);
    make("lipschitz", ext.lipschitz_cap, lip, 0.0, gt);
  }
  return rep;
}

VerificationReport verify_continuity(const Jet& jet, const Modulus& m, const GridSpec& grid, int levels,
                                     double delta0, std::uint64_t seed) {
  if (levels < 1) throw DomainError("continuity check needs at least one level");
  if (!(delta0 > 0.0)) throw DomainError("continuity check needs delta0 > 0");
  jet.validate();
  std::vector<Jet> jets;
  for (int k = 0; k <= levels; ++k) {
    const double d = delta0 / std::ldexp(1.0, k);
    Jet j = jet;
    for (std::size_t i = 0; i < jet.size(); ++i) {
      CounterRng rng(seed, i);
      j.values[i] += d * rng.uniform(-1.0, 1.0);
      for (int a = 0; a < jet.dim; ++a) j.gradients[i](a) += d * rng.uniform(-1.0, 1.0);
    }
    jets.push_back(std::move(j));
  }
  double A = compute_A(jet, m).constant;
  for (const Jet& j : jets) A = std::max(A, compute_A(j, m).constant);
  A *= 1.05;

  const ExtensionResult base = continuity_extend(jet, m, grid, A);
  VerificationReport rep;
  rep.seed = seed;
  rep.samples = levels;
  rep.values.emplace_back("A_bound", A);
  std::vector<double> ef, eg;
  double eps = base.eps;
  for (const Jet& j : jets) {
    const ExtensionResult e = continuity_extend(j, m, grid, A);
    eps = std::max(eps, e.eps);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
      a = std::max(a, std::abs(e.F[i] - base.F[i]));
      b = std::max(b, (e.grad_F[i] - base.grad_F[i]).norm());
    }
    ef.push_back(a);
    eg.push_back(b);
  }
  double scale = 1.0;
  for (double v : base.F.values) scale = std::max(scale, std::abs(v));
  const double tol = 4.0 * eps + rep.abs_tol * scale;
  double worst_f = -std::numeric_limits<double>::infinity(), worst_g = worst_f;
  for (std::size_t k = 0; k + 1 < ef.size(); ++k) {
    worst_f = std::max(worst_f, ef[k + 1] - ef[k]);
    worst_g = std::max(worst_g, eg[k + 1] - eg[k]);
  }
  for (std::size_t k = 0; k < ef.size(); ++k) {
    rep.values.emplace_back("error_F_" + std::to_string(k), ef[k]);
    rep.values.emplace_back("error_gradF_" + std::to_string(k), eg[k]);
  }
  BoundCheck c;
  c.name = "continuity_F_decreasing";
  c.observed = worst_f;
  c.abs_tol = tol;
  rep.add(c);
  c.name = "continuity_gradF_decreasing";
  c.observed = worst_g;
  c.abs_tol = tol / grid.max_spacing();
  rep.add(c);
  c.name = "continuity_F_shrinks";
  c.bound = ef.front();
  c.observed = ef.back();
  c.abs_tol = tol;
  rep.add(c);
  return rep;
}

}  // namespace jetx
