#pragma once

// Inner optimisation over the plane through a pair (y, z).
//
// With c = (y+z)/2, e1 = (z-y)/|z-y| and e2 the unit part of dG = G(y)-G(z)
// orthogonal to e1, a point x = c + a e1 + b e2 has
//   f(y) + <G(y),x-y> - f(z) - <G(z),x-z> = K0 + a g1 + b g2,
//   |x-y| = hypot(a + r, b),   |x-z| = hypot(a - r, b).
// Projecting any x onto this plane keeps the linear part and shrinks both
// distances, so the plane is enough in any dimension.

#include <jetx/jet.hpp>

namespace jetx::detail {

struct PairSlice {
  double K0 = 0.0, g1 = 0.0, g2 = 0.0, r = 0.0;
  Vec c, e1, e2;
  bool planar = false;  // g2 > 0: the second coordinate matters

  Vec point(double a, double b) const;
};

PairSlice make_slice(const Jet& jet, std::size_t iy, std::size_t iz);

struct SliceOptimum {
  double value = 0.0;
  double a = 0.0, b = 0.0;
  bool on_boundary = false;
};

/// min over the slice of K0 + a g1 + b g2 + M phi|x-y| + M phi|x-z|.
SliceOptimum minimize_V(const PairSlice& s, const Modulus& m, double M, double B,
                        const SearchBox& box);

/// max over the slice of |K0 + a g1 + b g2| / (phi|x-y| + phi|x-z|).
SliceOptimum maximize_ratio(const PairSlice& s, const Modulus& m, double B, const SearchBox& box);

/// Nelder-Mead minimiser in 1 or 2 variables.
struct NMResult {
  double x[2] = {0.0, 0.0};
  double f = 0.0;
};
NMResult nelder_mead(const std::function<double(const double*)>& f, int dim, const double* x0,
                     double step, int max_iter, double ftol = 1e-13);

}  // namespace jetx::detail
