#pragma once

#include <jetx/envelope.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace jetx {

/// One sampled bound. For `at_most`: passed iff
///   observed <= bound * (1 + rel_tol) + abs_tol,
/// for `at_least`: observed >= bound * (1 - rel_tol) - abs_tol.
struct BoundCheck {
  enum class Sense { at_most, at_least };

  std::string name;
  double bound = 0.0;
  double observed = 0.0;
  bool passed = true;
  Sense sense = Sense::at_most;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  std::vector<Vec> witness;
};

struct VerificationReport {
  std::vector<BoundCheck> checks;
  double grid_tol = 0.0;
  double abs_tol = 1e-9;
  std::uint64_t seed = 0;
  long samples = 0;
  /// Named measured quantities (sampled A(F, grad F), trace-seminorm bracket, ...).
  std::vector<std::pair<std::string, double>> values;

  bool passed() const;
  const BoundCheck& check(const std::string& name) const;
  bool has_check(const std::string& name) const;
  double value(const std::string& name) const;
  /// Adds a check and evaluates it.
  BoundCheck& add(BoundCheck c);
};

/// 10 w(h) / w(box diameter) for the modulus and grid of the extension.
double default_grid_tol(const ExtensionResult& ext);

/// Constant K with |grad F(x) - grad F(y)| <= K * C * w(|x - y|) for the
/// extension's modulus and norm: the Hoelder factor for power-law moduli,
/// 8/sqrt(15) (min form, see gradient_modulus_denominator) otherwise, 3 in lp mode.
double gradient_modulus_factor(const ExtensionResult& ext);

struct VerifyOptions {
  bool rebuild_check = true;      ///< rebuild at 1.1 C for the monotonicity check
  int family_points = 3;          ///< x samples for the family-dominance check
  double grid_tol = -1.0;         ///< < 0: default_grid_tol
};

/// Runs every sampled property of a built extension: sandwich, interpolation,
/// discrete paraconvexity of F and -F, maximality, monotonicity in C,
/// family dominance, sampled A(F, grad F) and M_w(grad F), the trace-seminorm
/// bracket, plus the variant-specific bounds (sup norms, Lipschitz cap).
VerificationReport verify_extension(const Jet& jet, const Modulus& m, const ExtensionResult& ext,
                                    long samples, std::uint64_t seed, const VerifyOptions& opt = {});

/// Sampled gradient-modulus bound for F and -F paraconvex with constant C_used.
VerificationReport verify_prop26(const ExtensionResult& ext, const Modulus& m, long samples,
                                 std::uint64_t seed);

/// Builds the fixed-A operator for jets (f + d_k p, G + d_k q) with d_k
/// halving `levels` times and checks that the sup errors against the
/// unperturbed extension decrease.
VerificationReport verify_continuity(const Jet& jet, const Modulus& m, const GridSpec& grid, int levels,
                                     double delta0, std::uint64_t seed);

/// The worked example f = (2/3)|x|^{3/2} on 401 points of [-1, 1], w = t^{1/2}.
VerificationReport golden_example_holder_half();

/// sup_{t>0} (t^{3/2} + 3 t^{1/2} + 2) / (2 (t+1)^{3/2}) by dense sweep; returns (value, argmax).
std::pair<double, double> golden_reduction_sweep(int points = 2000000, double t_max = 10.0);

}  // namespace jetx
