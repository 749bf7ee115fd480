#pragma once

#include <jetx/types.hpp>

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace jetx {

enum class Condition { W, MG, W11, A_value, M_omega_G, equivalences, modulus_identities };

std::string to_string(Condition c);

/// Outcome of a condition check over a finite jet (or a modulus).
///
/// `worst_slack` is the minimum over all tested instances of (rhs - lhs);
/// `passed` always equals `worst_slack >= -tol`. Value-type reports (A, M_w)
/// carry the computed supremum in `constant` and a zero slack when finite.
struct CheckReport {
  Condition condition = Condition::W;
  double constant = 0.0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double tol = 0.0;
  std::vector<Vec> witness;
  bool passed = true;
  std::vector<std::string> warnings;
  /// Named auxiliary values (equivalence constants, per-identity slacks).
  std::vector<std::pair<std::string, double>> details;

  /// Lowers worst_slack to `slack` when smaller, storing the witness.
  void record(double slack, std::vector<Vec> where);
  /// Sets `passed` from the slack and tolerance.
  void finalize();
  double detail(const std::string& name) const;
};

}  // namespace jetx
