#include <jetx/check_report.hpp>

#include <cmath>

namespace jetx {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::W:
      return "W";
    case Condition::MG:
      return "MG";
    case Condition::W11:
      return "W11";
    case Condition::A_value:
      return "A-value";
    case Condition::M_omega_G:
      return "M-omega-G";
    case Condition::equivalences:
      return "equivalences";
    case Condition::modulus_identities:
      return "modulus-identities";
  }
  return "unknown";
}

void CheckReport::record(double slack, std::vector<Vec> where) {
  if (std::isnan(slack)) {
    slack = -std::numeric_limits<double>::infinity();
  }
  if (slack < worst_slack) {
    worst_slack = slack;
    witness = std::move(where);
  }
}

void CheckReport::finalize() { passed = worst_slack >= -tol; }

double CheckReport::detail(const std::string& name) const {
  for (const auto& [key, value] : details) {
    if (key == name) return value;
  }
  throw Error("report has no detail named " + name);
}

}  // namespace jetx
