#include <jetx/jet.hpp>
#include <jetx/parallel.hpp>

#include "planar_search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetx {

Jet Jet::make(int dim, std::vector<Vec> points, std::vector<double> values,
              std::vector<Vec> gradients) {
  Jet j;
  j.dim = dim;
  j.points = std::move(points);
  j.values = std::move(values);
  j.gradients = std::move(gradients);
  j.validate();
  return j;
}

void Jet::validate() const {
  if (dim < 1 || dim > kMaxDim) throw SchemaError("jet dimension must be in 1..4");
  if (points.empty()) throw SchemaError("jet must contain at least one point");
  if (values.size() != points.size() || gradients.size() != points.size()) {
    throw SchemaError("jet points, values and gradients must have equal length");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim || gradients[i].size() != dim) {
      std::ostringstream os;
      os << "jet entry " << i << " does not have dimension " << dim;
      throw SchemaError(os.str());
    }
    if (!points[i].allFinite() || !gradients[i].allFinite() || !std::isfinite(values[i])) {
      std::ostringstream os;
      os << "jet entry " << i << " is not finite";
      throw SchemaError(os.str());
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = i + 1; k < points.size(); ++k) {
      if ((points[i] - points[k]).norm() <= 1e-12) {
        std::ostringstream os;
        os << "jet points " << i << " and " << k << " coincide";
        throw SchemaError(os.str());
      }
    }
  }
}

double Jet::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t k = i + 1; k < size(); ++k) d = std::max(d, (points[i] - points[k]).norm());
  return d;
}

double Jet::sup_abs_value() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double Jet::sup_grad_norm() const {
  double s = 0.0;
  for (const Vec& g : gradients) s = std::max(s, g.norm());
  return s;
}

double Jet::lipschitz_constant() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t k = i + 1; k < size(); ++k)
      s = std::max(s, std::abs(values[i] - values[k]) / (points[i] - points[k]).norm());
  return s;
}

namespace {

void require_M(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("constant M must be positive and finite");
}

double search_half_width(const Jet& jet, const SearchBox& box) {
  if (box.half_width > 0.0) return box.half_width;
  const double d = jet.diameter();
  return 4.0 * (d > 0.0 ? d : 1.0);
}

struct PairIndex {
  std::size_t y, z;
};

std::vector<PairIndex> pairs(std::size_t n, bool ordered) {
  std::vector<PairIndex> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = ordered ? 0 : i + 1; k < n; ++k)
      if (i != k) out.push_back({i, k});
  return out;
}

template <class SlackFn>
CheckReport closed_form_check(const Jet& jet, Condition cond, double M, double tol, SlackFn slack) {
  CheckReport rep;
  rep.condition = cond;
  rep.constant = M;
  rep.tol = tol;
  rep.worst_slack = 0.0;  // y = z
  rep.witness = {jet.points[0], jet.points[0]};
  for (std::size_t i = 0; i < jet.size(); ++i)
    for (std::size_t k = 0; k < jet.size(); ++k)
      if (i != k) rep.record(slack(i, k), {jet.points[i], jet.points[k]});
  rep.finalize();
  return rep;
}

// check_mg with an optional early exit on the first failing pair.
CheckReport mg_impl(const Jet& jet, const Modulus& m, double M, const SearchBox& search, double tol,
                    bool stop_early) {
  require_M(M);
  jet.validate();
  CheckReport rep;
  rep.condition = Condition::MG;
  rep.constant = M;
  rep.tol = tol;
  rep.worst_slack = 0.0;
  rep.witness = {jet.points[0], jet.points[0], jet.points[0]};
  const double B = search_half_width(jet, search);
  const auto ps = pairs(jet.size(), true);
  if (stop_early) {
    for (const auto& p : ps) {
      const auto s = detail::make_slice(jet, p.y, p.z);
      const auto o = detail::minimize_V(s, m, M, B, search);
      rep.record(o.value, {s.point(o.a, o.b), jet.points[p.y], jet.points[p.z]});
      if (o.value < -tol) break;
    }
    rep.finalize();
    return rep;
  }
  std::vector<detail::SliceOptimum> res(ps.size());
  std::vector<detail::PairSlice> slices(ps.size());
  parallel_for(ps.size(), [&](std::size_t i) {
    slices[i] = detail::make_slice(jet, ps[i].y, ps[i].z);
    res[i] = detail::minimize_V(slices[i], m, M, B, search);
  });
  bool boundary = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    rep.record(res[i].value,
               {slices[i].point(res[i].a, res[i].b), jet.points[ps[i].y], jet.points[ps[i].z]});
    boundary = boundary || res[i].on_boundary;
  }
  if (boundary) rep.warnings.push_back("search box too small: minimiser on the slice-box boundary");
  rep.finalize();
  return rep;
}

}  // namespace

CheckReport check_W(const Jet& jet, const Modulus& m, double M, double tol) {
  require_M(M);
  jet.validate();
  return closed_form_check(jet, Condition::W, M, tol, [&](std::size_t i, std::size_t k) {
    const Vec& y = jet.points[i];
    const Vec& z = jet.points[k];
    const Vec& Gy = jet.gradients[i];
    const Vec& Gz = jet.gradients[k];
    return jet.values[i] + 0.5 * (Gy + Gz).dot(z - y) + M * m.phi((y - z).norm()) -
           2.0 * M * m.phi_star((Gy - Gz).norm() / (2.0 * M)) - jet.values[k];
  });
}

CheckReport check_mg(const Jet& jet, const Modulus& m, double M, const SearchBox& search, double tol) {
  return mg_impl(jet, m, M, search, tol, false);
}

CheckReport check_wells_W11(const Jet& jet, double M, double tol) {
  require_M(M);
  jet.validate();
  return closed_form_check(jet, Condition::W11, M, tol, [&](std::size_t i, std::size_t k) {
    const Vec d = jet.points[k] - jet.points[i];
    const Vec dG = jet.gradients[i] - jet.gradients[k];
    return jet.values[i] + 0.5 * (jet.gradients[i] + jet.gradients[k]).dot(d) +
           0.25 * M * d.squaredNorm() - dG.squaredNorm() / (4.0 * M) - jet.values[k];
  });
}

CheckReport compute_A(const Jet& jet, const Modulus& m, const SearchBox& search) {
  jet.validate();
  CheckReport rep;
  rep.condition = Condition::A_value;
  rep.constant = 0.0;
  rep.worst_slack = 0.0;
  rep.witness = {jet.points[0], jet.points[0], jet.points[0]};
  const double B = search_half_width(jet, search);
  const auto ps = pairs(jet.size(), false);
  std::vector<detail::SliceOptimum> res(ps.size());
  std::vector<detail::PairSlice> slices(ps.size());
  parallel_for(ps.size(), [&](std::size_t i) {
    slices[i] = detail::make_slice(jet, ps[i].y, ps[i].z);
    res[i] = detail::maximize_ratio(slices[i], m, B, search);
  });
  bool boundary = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (res[i].value > rep.constant) {
      rep.constant = res[i].value;
      rep.witness = {slices[i].point(res[i].a, res[i].b), jet.points[ps[i].y], jet.points[ps[i].z]};
      boundary = res[i].on_boundary;
    }
  }
  if (boundary) rep.warnings.push_back("search box too small: maximiser on the slice-box boundary");
  rep.finalize();
  return rep;
}

CheckReport m_omega_G(const Jet& jet, const Modulus& m) {
  jet.validate();
  CheckReport rep;
  rep.condition = Condition::M_omega_G;
  rep.worst_slack = 0.0;
  rep.witness = {jet.points[0], jet.points[0]};
  for (std::size_t i = 0; i < jet.size(); ++i) {
    for (std::size_t k = i + 1; k < jet.size(); ++k) {
      const double q = (jet.gradients[i] - jet.gradients[k]).norm() /
                       m.omega((jet.points[i] - jet.points[k]).norm());
      if (q > rep.constant) {
        rep.constant = q;
        rep.witness = {jet.points[i], jet.points[k]};
      }
    }
  }
  rep.finalize();
  return rep;
}

ThresholdResult smallest_constant(const std::function<bool(double)>& passes) {
  double lo = 1e-8, hi = 1e8;
  if (passes(lo)) return {0.0, true};
  if (!passes(hi)) return {std::numeric_limits<double>::infinity(), false};
  for (int i = 0; i < 30; ++i) {
    const double mid = std::sqrt(lo * hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return {hi, true};
}

CheckReport check_equivalences(const Jet& jet, const Modulus& m, const SearchBox& search) {
  jet.validate();
  CheckReport rep;
  rep.condition = Condition::equivalences;
  rep.tol = 1e-3;
  rep.worst_slack = 0.0;

  const auto MW = smallest_constant([&](double M) { return check_W(jet, m, M).passed; });
  const auto Mmg = smallest_constant(
      [&](double M) { return mg_impl(jet, m, M, search, kSearchTol, true).passed; });
  const double A = compute_A(jet, m, search).constant;
  const double Mw = jet.size() >= 2 ? m_omega_G(jet, m).constant : 0.0;
  rep.details = {{"M_W", MW.value}, {"M_mg", Mmg.value}, {"A", A}, {"M_omega_G", Mw}};
  if (!MW.found || !Mmg.found) {
    rep.constant = std::numeric_limits<double>::infinity();
    rep.worst_slack = -std::numeric_limits<double>::infinity();
    rep.warnings.push_back("no finite constant in [1e-8, 1e8]");
    rep.finalize();
    return rep;
  }
  rep.constant = Mmg.value;

  auto rel = [](double lhs, double rhs) { return (rhs - lhs) / std::max({std::abs(rhs), std::abs(lhs), 1e-12}); };
  auto implied = [](const CheckReport& r, double M) {
    return r.passed ? std::max(0.0, r.worst_slack) : r.worst_slack / std::max(1.0, M);
  };
  auto add = [&](const std::string& name, double slack) {
    rep.details.emplace_back(name, slack);
    rep.record(slack, {});
  };
  const double floorM = 1e-8;
  const double M1 = std::max(4.0 * MW.value, floorM);
  add("mg_at_4M_W", implied(check_mg(jet, m, M1, search), M1));
  const double M2 = std::max(Mmg.value, floorM);
  add("W_at_M_mg", implied(check_W(jet, m, M2), M2));
  add("M_mg_le_4M_W", rel(Mmg.value, 4.0 * MW.value));
  add("M_W_le_M_mg", rel(MW.value, Mmg.value));

  double pair_slack = 0.0;
  const double c8 = 8.0 / std::sqrt(15.0), c4 = 4.0 / std::sqrt(3.0);
  for (std::size_t i = 0; i < jet.size(); ++i) {
    for (std::size_t k = i + 1; k < jet.size(); ++k) {
      const double d = (jet.points[i] - jet.points[k]).norm();
      const double lhs = (jet.gradients[i] - jet.gradients[k]).norm();
      const double rhs = Mmg.value * std::min(c8 * m.omega(d), c4 * m.omega(0.5 * d));
      pair_slack = std::min(pair_slack, rel(lhs, rhs));
    }
  }
  add("grad_diff_hilbert", pair_slack);
  add("M_omega_le_3M_mg", rel(Mw, 3.0 * Mmg.value));
  if (m.is_power_law()) {
    const double a = m.exponent();
    const double f = std::pow(2.0, 1.0 - a) / std::sqrt(1.0 + a) * std::pow(1.0 + 1.0 / a, a / 2.0);
    add("M_omega_le_holder_factor_M_mg", rel(Mw, f * Mmg.value));
  }
  add("M_omega_le_4M_W", rel(Mw, 4.0 * MW.value));
  rep.finalize();
  return rep;
}

}  // namespace jetx
