#include "planar_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace jetx::detail {

Vec PairSlice::point(double a, double b) const {
  Vec x = c + a * e1;
  if (planar) x += b * e2;
  return x;
}

PairSlice make_slice(const Jet& jet, std::size_t iy, std::size_t iz) {
  const Vec& y = jet.points[iy];
  const Vec& z = jet.points[iz];
  PairSlice s;
  s.c = 0.5 * (y + z);
  const Vec d = z - y;
  s.r = 0.5 * d.norm();
  s.e1 = d / (2.0 * s.r);
  const Vec dG = jet.gradients[iy] - jet.gradients[iz];
  s.g1 = dG.dot(s.e1);
  Vec perp = dG - s.g1 * s.e1;
  const double pn = perp.norm();
  s.e2 = Vec::Zero(jet.dim);
  if (pn > 1e-14 * std::max(1.0, dG.norm())) {
    s.e2 = perp / pn;
    s.g2 = pn;
    s.planar = true;
  }
  s.K0 = jet.values[iy] - jet.values[iz] + s.r * (jet.gradients[iy] + jet.gradients[iz]).dot(s.e1);
  return s;
}

NMResult nelder_mead(const std::function<double(const double*)>& f, int dim, const double* x0,
                     double step, int max_iter, double ftol) {
  const int np = dim + 1;
  std::array<std::array<double, 2>, 3> p{};
  std::array<double, 3> fv{};
  for (int i = 0; i < np; ++i) {
    for (int k = 0; k < dim; ++k) p[i][k] = x0[k];
    if (i > 0) p[i][i - 1] += step;
    fv[i] = f(p[i].data());
  }
  auto order = [&] {
    for (int i = 1; i < np; ++i) {
      for (int j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
        std::swap(fv[j], fv[j - 1]);
        std::swap(p[j], p[j - 1]);
      }
    }
  };
  order();
  for (int it = 0; it < max_iter; ++it) {
    double size = 0.0;
    for (int i = 1; i < np; ++i)
      for (int k = 0; k < dim; ++k) size = std::max(size, std::abs(p[i][k] - p[0][k]));
    const double scale = 1.0 + std::abs(p[0][0]) + (dim > 1 ? std::abs(p[0][1]) : 0.0);
    if (fv[np - 1] - fv[0] <= ftol * (1.0 + std::abs(fv[0])) && size <= 1e-9 * scale) break;

    std::array<double, 2> cen{0.0, 0.0}, xr{}, xe{}, xc{};
    for (int i = 0; i < np - 1; ++i)
      for (int k = 0; k < dim; ++k) cen[k] += p[i][k] / (np - 1);
    const auto& worst = p[np - 1];
    for (int k = 0; k < dim; ++k) xr[k] = cen[k] + (cen[k] - worst[k]);
    const double fr = f(xr.data());
    if (fr < fv[0]) {
      for (int k = 0; k < dim; ++k) xe[k] = cen[k] + 2.0 * (cen[k] - worst[k]);
      const double fe = f(xe.data());
      if (fe < fr) {
        p[np - 1] = xe;
        fv[np - 1] = fe;
      } else {
        p[np - 1] = xr;
        fv[np - 1] = fr;
      }
    } else if (fr < fv[np - 2]) {
      p[np - 1] = xr;
      fv[np - 1] = fr;
    } else {
      const bool outside = fr < fv[np - 1];
      for (int k = 0; k < dim; ++k)
        xc[k] = outside ? cen[k] + 0.5 * (xr[k] - cen[k]) : cen[k] + 0.5 * (worst[k] - cen[k]);
      const double fc = f(xc.data());
      if (fc < std::min(fr, fv[np - 1])) {
        p[np - 1] = xc;
        fv[np - 1] = fc;
      } else {
        for (int i = 1; i < np; ++i) {
          for (int k = 0; k < dim; ++k) p[i][k] = p[0][k] + 0.5 * (p[i][k] - p[0][k]);
          fv[i] = f(p[i].data());
        }
      }
    }
    order();
  }
  NMResult out;
  out.x[0] = p[0][0];
  out.x[1] = dim > 1 ? p[0][1] : 0.0;
  out.f = fv[0];
  return out;
}

namespace {

struct Candidate {
  double f, a, b, step;
};

// Shared driver: minimise `obj` over the slice using a global grid, a local
// grid of half-width L, the anchor points y, z, c, and Nelder-Mead from the
// best few candidates.
template <class Obj>
SliceOptimum search(const PairSlice& s, Obj obj, double B, double L, const SearchBox& box) {
  const bool two = s.planar;
  std::vector<Candidate> cand;
  auto grid = [&](double ca, double cb, double half, int res) {
    res = std::max(res, 3);
    const double h = 2.0 * half / (res - 1);
    for (int i = 0; i < res; ++i) {
      const double a = ca - half + i * h;
      if (!two) {
        cand.push_back({obj(a, 0.0), a, 0.0, h});
        continue;
      }
      for (int j = 0; j < res; ++j) {
        const double b = cb - half + j * h;
        cand.push_back({obj(a, b), a, b, h});
      }
    }
  };
  grid(0.0, 0.0, B, box.resolution);
  if (L < B) grid(0.0, 0.0, L, box.local_resolution);
  const double hb = 2.0 * B / (std::max(box.resolution, 3) - 1);
  for (double a : {-s.r, s.r, 0.0}) cand.push_back({obj(a, 0.0), a, 0.0, std::min(hb, s.r)});

  // Zoom around the best candidate so far.
  auto best_it = std::min_element(cand.begin(), cand.end(),
                                  [](const Candidate& p, const Candidate& q) { return p.f < q.f; });
  const Candidate seed = *best_it;
  grid(seed.a, seed.b, 2.0 * seed.step, box.local_resolution);

  const int keep = std::min<int>(box.refine_starts, static_cast<int>(cand.size()));
  std::partial_sort(cand.begin(), cand.begin() + keep, cand.end(),
                    [](const Candidate& p, const Candidate& q) { return p.f < q.f; });

  SliceOptimum best{cand[0].f, cand[0].a, cand[0].b, false};
  const int dim = two ? 2 : 1;
  for (int k = 0; k < keep; ++k) {
    const double x0[2] = {cand[k].a, cand[k].b};
    const NMResult r = nelder_mead(
        [&](const double* x) { return obj(x[0], two ? x[1] : 0.0); }, dim, x0,
        0.5 * cand[k].step, box.refine_iterations);
    if (r.f < best.value) best = {r.f, r.x[0], two ? r.x[1] : 0.0, false};
  }
  best.on_boundary = std::abs(best.a) >= B * (1.0 - 1e-6) || std::abs(best.b) >= B * (1.0 - 1e-6);
  return best;
}

}  // namespace

SliceOptimum minimize_V(const PairSlice& s, const Modulus& m, double M, double B,
                        const SearchBox& box) {
  auto V = [&](double a, double b) {
    return s.K0 + a * s.g1 + b * s.g2 + M * (m.phi(std::hypot(a + s.r, b)) + m.phi(std::hypot(a - s.r, b)));
  };
  double rho = s.r;
  const double dg = std::hypot(s.g1, s.g2);
  try {
    rho = m.omega_inv(dg / (2.0 * M));
  } catch (const RangeExceeded&) {
    rho = B;
  }
  const double L = 2.0 * (s.r + rho);
  return search(s, V, B, L, box);
}

SliceOptimum maximize_ratio(const PairSlice& s, const Modulus& m, double B, const SearchBox& box) {
  auto neg_ratio = [&](double a, double b) {
    const double num = std::abs(s.K0 + a * s.g1 + b * s.g2);
    const double den = m.phi(std::hypot(a + s.r, b)) + m.phi(std::hypot(a - s.r, b));
    return -num / den;
  };
  // Rough ratio at the anchors sets the scale rho where phi' balances |dG|.
  double R0 = 0.0;
  for (double a : {-s.r, 0.0, s.r}) R0 = std::max(R0, -neg_ratio(a, 0.0));
  const double dg = std::hypot(s.g1, s.g2);
  double rho = s.r;
  if (R0 > 0.0 && dg > 0.0) {
    try {
      rho = m.omega_inv(dg / (2.0 * R0));
    } catch (const RangeExceeded&) {
      rho = B;
    }
  }
  const double L = 2.0 * (s.r + rho);
  SliceOptimum o = search(s, neg_ratio, B, L, box);
  o.value = -o.value;
  return o;
}

}  // namespace jetx::detail
