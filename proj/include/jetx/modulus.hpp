#pragma once

#include <jetx/check_report.hpp>

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace jetx {

/// A concave increasing modulus of continuity w with w(0) = 0, together with
/// its calculus:
///
///   phi(t)      = int_0^t w(s) ds          (convex, phi(0) = 0)
///   omega_inv   = w^{-1}
///   phi_star(s) = int_0^s w^{-1}(r) dr     (Fenchel conjugate of phi)
///
/// Three public kinds exist: Hoelder t^alpha, linear a*t, and tabulated
/// piecewise-linear data extrapolated with its last slope. A fourth kind,
/// `capped`, freezes w beyond a knee; it has bounded w so omega_inv and
/// phi_star are only defined below w(knee). It is used by the Lipschitz
/// extension and cannot be serialized.
///
/// Values are immutable; copies share the tabulated data.
class Modulus {
 public:
  enum class Kind { holder, linear, tabulated, capped };

  static Modulus holder(double alpha);
  static Modulus linear(double slope);
  /// Samples (t_i, w_i) must be strictly increasing in both coordinates with
  /// nonincreasing chord slopes. (0, 0) is prepended when absent.
  static Modulus tabulated(std::vector<std::pair<double, double>> samples);
  static Modulus capped(const Modulus& base, double knee);

  Kind kind() const;

  double omega(double t) const;
  double omega_inv(double s) const;
  double phi(double t) const;
  double phi_star(double s) const;

  /// Exponent for power-law kinds (holder: alpha, linear: 1). Throws otherwise.
  double exponent() const;
  bool is_power_law() const { return kind() == Kind::holder || kind() == Kind::linear; }

  /// Default identity tolerance: 1e-8 for closed forms, 1e-6 for tabulated data.
  double tolerance() const;

  /// Tabulated samples including the prepended origin. Empty for other kinds.
  const std::vector<std::pair<double, double>>& samples() const;
  /// For capped moduli: the base and knee.
  const Modulus& base() const;
  double knee() const;

  std::string describe() const;

 private:
  struct Holder {
    double alpha;
  };
  struct Linear {
    double slope;
  };
  struct Table;
  struct Capped {
    std::shared_ptr<const Modulus> base;
    double knee;
  };

  explicit Modulus(std::variant<Holder, Linear, std::shared_ptr<const Table>, Capped> rep)
      : rep_(std::move(rep)) {}

  std::variant<Holder, Linear, std::shared_ptr<const Table>, Capped> rep_;
};

/// Sampled function on [0, T] used as input to numeric conjugation.
struct SampledFunction {
  std::vector<double> t;
  std::vector<double> value;

  static SampledFunction sample(const std::function<double(double)>& f, double t_max, int points);
};

/// sup_{t >= 0} { s t - f(t) } over the even extension of f, from samples on
/// [0, T]. The discrete argmax is refined by golden-section search on the
/// local quadratic interpolant through its neighbours. Throws RangeExceeded
/// when the argmax is the last sample.
double fenchel_conjugate_numeric(const SampledFunction& f, double s);

/// Same, refining against the callable itself instead of the interpolant.
double fenchel_conjugate_numeric(const std::function<double(double)>& f, double t_max, int points,
                                 double s);

/// Checks, for every t: (t/2)w(t) <= phi(t) <= t w(t/2);
/// t w^{-1}(t/2) <= phi*(t) <= (t/2) w^{-1}(t); phi(t) + phi*(w(t)) = t w(t);
/// w(ct) <= c w(t) for c in {1, 2, 5}. Slacks are normalised by
/// max(1, |magnitude of the compared terms|).
CheckReport check_modulus_identities(const Modulus& m, std::span<const double> t_samples,
                                     double tol = -1.0);

}  // namespace jetx
