#pragma once

#include <jetx/grid.hpp>
#include <jetx/jet.hpp>
#include <jetx/modulus.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace jetx {

enum class Variant { general, holder, c11, bounded, lipschitz, lp };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// max_z f(z) + <G(z), x-z> - M phi(|x-z|)
double eval_m(const Jet& jet, const Modulus& m, double M, const Vec& x, const NormMode& norm = {});
/// min_y f(y) + <G(y), x-y> + M phi(|x-y|)
double eval_g(const Jet& jet, const Modulus& m, double M, const Vec& x, const NormMode& norm = {});

struct EnvelopeStats {
  long rounds = 0;           ///< Gauss-Seidel rounds
  long line_updates = 0;     ///< line passes performed
  double residual = 0.0;     ///< max decrease in the certifying Jacobi sweep
  std::size_t changed = 0;   ///< nodes that moved below u0
};

/// Largest discrete C-phi-paraconvex minorant of u0 along the stencil lines,
/// clamped below by `floor`:
///
///   u(x) <= t/(s+t) u(x+sd) + s/(s+t) u(x-td) + C st/(s+t)^2 phi((s+t)|d|)
///
/// for all stencil directions d and integer steps s, t >= 1. Gauss-Seidel
/// passes over lattice lines until the per-round change drops below eps,
/// then one Jacobi sweep certifies the fixed point. With a finite
/// `lipschitz_cap` L the iterate is also replaced by its largest L-Lipschitz
/// minorant (Euclidean cone inf-convolution) between rounds.
GridFunction paraconvex_envelope_grid(const GridFunction& u0, const GridFunction& floor, double C,
                                      const Modulus& m, const DirectionSet& stencil, double eps,
                                      EnvelopeStats* stats = nullptr,
                                      double lipschitz_cap = std::numeric_limits<double>::infinity(),
                                      long max_rounds = 100000);

/// One Jacobi application of the envelope operator; returns max(u - T u).
double envelope_residual(const GridFunction& u, const GridFunction& floor, double C, const Modulus& m,
                         const DirectionSet& stencil);

struct ExtensionResult {
  GridFunction F;
  std::vector<Vec> grad_F;
  GridFunction lower;  ///< m on the grid
  GridFunction upper;  ///< g on the grid (u0 of the envelope)
  Modulus modulus_used = Modulus::linear(1.0);
  NormMode norm;
  DirectionSet stencil;
  Variant variant = Variant::general;
  double M_used = 0.0;
  double C_used = 0.0;
  double A_computed = 0.0;
  double lipschitz_cap = std::numeric_limits<double>::infinity();
  long iterations = 0;
  double residual = 0.0;
  double eps = 0.0;
  std::vector<std::size_t> snapped;  ///< grid node of each E point
  GridSpec work_grid;  ///< padded grid the envelope ran on; F is its crop
  Index work_offset{0, 0, 0, 0};  ///< node of work_grid at the origin of F
  std::vector<std::pair<std::string, double>> diagnostics;

  double diagnostic(const std::string& name) const;
};

struct ExtendOptions {
  Variant variant = Variant::general;
  double M = -1.0;  ///< <= 0: use A(f, G)
  double A = -1.0;  ///< known A(f, G); < 0: compute it
  double p = 2.0;   ///< lp variant exponent
  DirectionSet stencil;  ///< empty: default_stencil
  SearchBox search;
  long lp_samples = 200000;
  std::uint64_t seed = 1;
};

/// Builds the extension on `grid`. Every E point must lie within half a
/// cell of a distinct node. Throws NotExtendable when A(f, G) is not finite
/// at the bisection scale, GridError for off-grid or colliding points.
/// The envelope itself runs on `grid` padded by a quarter of its width per
/// side (see work_grid); the result is cropped back to `grid`.
ExtensionResult extend(const Jet& jet, const Modulus& m, const GridSpec& grid,
                       const ExtendOptions& opt = {});

/// C^{1,1} path for a linear modulus: lower convex hull of g + (M/2)|x|^2
/// along every axis, then the C = M envelope, minus (M/2)|x|^2.
ExtensionResult extend_c11_biconjugate(const Jet& jet, double M, const GridSpec& grid,
                                       const Modulus& m = Modulus::linear(1.0));

/// Bounded jets: caps +-2(|f|_inf + |G|_inf) on g and m, and
/// M = max(3(|f|_inf + |G|_inf)/phi(1), A).
ExtensionResult bounded_extend(const Jet& jet, const Modulus& m, const GridSpec& grid,
                               const ExtendOptions& opt = {});

/// The fixed-A operator: M = 3(|f|_inf + |G|_inf)/phi(1) + A, same caps.
/// Depends continuously on the jet for fixed A.
ExtensionResult continuity_extend(const Jet& jet, const Modulus& m, const GridSpec& grid, double A,
                                  const DirectionSet& stencil = {});

/// Lipschitz jets: phi replaced by its linearisation beyond t = 1,
/// M~ = max(M, 2(lip f + |G|_inf)/phi(1)), Lipschitz cap |G|_inf + w(1) M~.
ExtensionResult lipschitz_extend(const Jet& jet, const Modulus& m, const GridSpec& grid,
                                 const ExtendOptions& opt = {});

/// Largest sampled value of (|u+h|^p + |u-h|^p - 2|u|^p) / |h|^p in l_p^n.
double lp_smoothness_constant(double p, int n, long samples, std::uint64_t seed = 1);

/// Constant of -phi(|.|_p) paraconvexity: 1 + 3^{1+a}/(1+a) * c, a = p - 1.
double lp_paraconvexity_constant(double p, double smoothness);

struct FamilyBudget {
  int knots = 3;          ///< k <= 8
  int iterations = 400;   ///< Nelder-Mead steps per start
  int max_starts = 0;     ///< starts from the nearest E points only; 0 = all
};

/// Best value at x of h = a + <xi, .> - sum l_i M phi(|. - p_i|) with h <= g
/// on the nodes of `constraint_grid`. Starts from psi_y^- for y in E (the
/// nearest `max_starts` of them), so the result is always a feasible member.
double family_F_lower_bound(const Jet& jet, const Modulus& m, double M, const Vec& x,
                            const GridSpec& constraint_grid, const FamilyBudget& budget = {});

/// Lower convex envelope of the points (xs[i], ys[i]) evaluated at xs
/// (xs strictly increasing).
std::vector<double> lower_hull_1d(const std::vector<double>& xs, const std::vector<double>& ys);

/// Discrete Legendre transform: out[k] = max_i slopes[k] xs[i] - ys[i].
std::vector<double> discrete_legendre(const std::vector<double>& xs, const std::vector<double>& ys,
                                      const std::vector<double>& slopes);

}  // namespace jetx
