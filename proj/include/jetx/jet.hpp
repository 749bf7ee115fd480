#pragma once

#include <jetx/check_report.hpp>
#include <jetx/modulus.hpp>

#include <functional>
#include <vector>

namespace jetx {

/// A 1-jet (f, G) on a finite set E of R^n, n <= 4.
struct Jet {
  int dim = 1;
  std::vector<Vec> points;
  std::vector<double> values;
  std::vector<Vec> gradients;

  /// Builds and validates. Throws SchemaError on mismatched lengths, wrong
  /// vector sizes, non-finite entries or points closer than 1e-12.
  static Jet make(int dim, std::vector<Vec> points, std::vector<double> values,
                  std::vector<Vec> gradients);

  void validate() const;
  std::size_t size() const { return points.size(); }
  double diameter() const;
  double sup_abs_value() const;
  double sup_grad_norm() const;
  /// max |f(y) - f(z)| / |y - z| over pairs; 0 for a single point.
  double lipschitz_constant() const;
};

/// Protocol of the planar inner search used by check_mg and compute_A.
/// half_width <= 0 selects 4 * (max pairwise distance).
struct SearchBox {
  double half_width = -1.0;
  int resolution = 101;
  int local_resolution = 51;
  int refine_iterations = 200;
  int refine_starts = 3;
};

/// Slack for closed-form checks and for checks with an inner optimisation.
inline constexpr double kClosedFormTol = 1e-9;
inline constexpr double kSearchTol = 1e-6;

CheckReport check_W(const Jet& jet, const Modulus& m, double M, double tol = kClosedFormTol);

CheckReport check_mg(const Jet& jet, const Modulus& m, double M, const SearchBox& search = {},
                     double tol = kSearchTol);

/// Closed-form C^{1,1} test with the quadratic terms (M/4)|d|^2 and |dG|^2/(4M).
CheckReport check_wells_W11(const Jet& jet, double M, double tol = kClosedFormTol);

/// sup of |f(y) + <G(y), x-y> - f(z) - <G(z), x-z>| / (phi|x-y| + phi|x-z|).
/// The value is in `constant`; the witness is (x, y, z).
CheckReport compute_A(const Jet& jet, const Modulus& m, const SearchBox& search = {});

/// max |G(y) - G(z)| / omega(|y - z|).
CheckReport m_omega_G(const Jet& jet, const Modulus& m);

struct ThresholdResult {
  double value = 0.0;  ///< smallest passing constant; +inf when none in the bracket
  bool found = true;
};

/// Smallest M in [1e-8, 1e8] with `passes(M)`, by 30 halvings in log space.
/// Returns 0 when the lower end already passes.
ThresholdResult smallest_constant(const std::function<bool(double)>& passes);

/// Finds the W and mg thresholds and checks the implications between
/// them. Details: M_W, M_mg, A, M_omega_G and the slack of each implication.
CheckReport check_equivalences(const Jet& jet, const Modulus& m, const SearchBox& search = {});

}  // namespace jetx
