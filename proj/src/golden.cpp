#include <jetx/verify.hpp>

#include <chrono>
#include <cmath>

namespace jetx {

std::pair<double, double> golden_reduction_sweep(int points, double t_max) {
  if (points < 2 || !(t_max > 0.0)) throw DomainError("sweep needs points >= 2 and t_max > 0");
  double best = -1.0, arg = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double t = t_max * i / points;
    const double v = (std::pow(t, 1.5) + 3.0 * std::sqrt(t) + 2.0) / (2.0 * std::pow(t + 1.0, 1.5));
    if (v > best) best = v, arg = t;
  }
  return {best, arg};
}

VerificationReport golden_example_holder_half() {
  std::vector<Vec> pts, grads;
  std::vector<double> vals;
  for (int i = 0; i < 401; ++i) {
    const double x = -1.0 + 2.0 * i / 400.0;
    pts.push_back(Vec::Constant(1, x));
    vals.push_back(2.0 / 3.0 * std::pow(std::abs(x), 1.5));
    grads.push_back(Vec::Constant(1, std::copysign(std::sqrt(std::abs(x)), x)));
  }
  const Jet jet = Jet::make(1, pts, vals, grads);
  const Modulus m = Modulus::holder(0.5);

  const auto t0 = std::chrono::steady_clock::now();
  const double Mw = m_omega_G(jet, m).constant;
  const double A = compute_A(jet, m).constant;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto [sweep, t_star] = golden_reduction_sweep();

  VerificationReport rep;
  rep.values = {{"M_omega_G", Mw}, {"A", A}, {"sweep_value", sweep}, {"sweep_argmax", t_star}, {"seconds", secs}};
  auto add = [&](const std::string& name, double bound, double observed, BoundCheck::Sense sense) {
    BoundCheck c;
    c.name = name;
    c.bound = bound;
    c.observed = observed;
    c.sense = sense;
    rep.add(c);
  };
  using S = BoundCheck::Sense;
  add("M_omega_G_is_sqrt2", 1e-3, std::abs(Mw - std::sqrt(2.0)), S::at_most);
  add("A_at_least_1.30", 1.30, A, S::at_least);
  add("A_at_most_1.3076", 1.3066 + 1e-3, A, S::at_most);
  add("A_below_M_omega_G", 0.0, A - Mw, S::at_most);
  rep.checks.back().passed = A < Mw;
  add("sweep_matches_A", 1e-3, std::abs(A - sweep), S::at_most);
  add("runtime_seconds", 10.0, secs, S::at_most);

  ExtendOptions opt;
  opt.variant = Variant::holder;
  opt.A = A;
  const ExtensionResult ext = extend(jet, m, GridSpec::make(1, {-3.0}, {3.0}, {1201}), opt);
  const VerificationReport v = verify_extension(jet, m, ext, 20000, 1);
  for (BoundCheck c : v.checks) {
    c.name = "extension/" + c.name;
    rep.checks.push_back(c);
  }
  for (const auto& [k, x] : v.values) rep.values.emplace_back("extension/" + k, x);
  rep.grid_tol = v.grid_tol;
  rep.seed = v.seed;
  rep.samples = v.samples;
  return rep;
}

}  // namespace jetx
