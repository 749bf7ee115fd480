#include <jetx/modulus.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetx {

namespace {

void require_arg(double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0) {
    std::ostringstream os;
    os << what << ": argument must be finite and nonnegative, got " << t;
    throw DomainError(os.str());
  }
}

}  // namespace

// Piecewise-linear table. Prefix integrals along both axes are kept so that
// phi and phi_star are exact for the interpolant and independent of each other.
struct Modulus::Table {
  std::vector<std::pair<double, double>> pts;
  std::vector<double> t, w, slope;
  std::vector<double> phi_prefix;   // int_0^{t_i} omega
  std::vector<double> star_prefix;  // int_0^{w_i} omega^{-1}
};

Modulus Modulus::holder(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw SchemaError("holder exponent must lie in (0, 1]");
  }
  return Modulus(Holder{alpha});
}

Modulus Modulus::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw SchemaError("linear modulus slope must be positive");
  }
  return Modulus(Linear{slope});
}

Modulus Modulus::tabulated(std::vector<std::pair<double, double>> samples) {
  for (const auto& [t, w] : samples) {
    if (!std::isfinite(t) || !std::isfinite(w)) throw SchemaError("tabulated modulus: non-finite sample");
  }
  if (samples.empty() || samples.front().first != 0.0) {
    samples.insert(samples.begin(), {0.0, 0.0});
  } else if (samples.front().second != 0.0) {
    throw SchemaError("tabulated modulus: omega(0) must be 0");
  }
  if (samples.size() < 2) throw SchemaError("tabulated modulus needs at least one positive sample");

  auto tab = std::make_shared<Table>();
  tab->pts = samples;
  const std::size_t n = samples.size();
  for (const auto& [t, w] : samples) {
    tab->t.push_back(t);
    tab->w.push_back(w);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = tab->t[i + 1] - tab->t[i];
    const double dw = tab->w[i + 1] - tab->w[i];
    if (!(dt > 0.0)) throw SchemaError("tabulated modulus: t samples must be strictly increasing");
    if (!(dw > 0.0)) throw SchemaError("tabulated modulus: omega samples must be strictly increasing");
    const double s = dw / dt;
    if (i > 0 && s > tab->slope.back() * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "tabulated modulus is not concave at t = " << tab->t[i];
      throw SchemaError(os.str());
    }
    tab->slope.push_back(s);
  }
  tab->phi_prefix.assign(n, 0.0);
  tab->star_prefix.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    tab->phi_prefix[i + 1] =
        tab->phi_prefix[i] + 0.5 * (tab->t[i + 1] - tab->t[i]) * (tab->w[i] + tab->w[i + 1]);
    tab->star_prefix[i + 1] =
        tab->star_prefix[i] + 0.5 * (tab->w[i + 1] - tab->w[i]) * (tab->t[i] + tab->t[i + 1]);
  }
  return Modulus(std::shared_ptr<const Table>(std::move(tab)));
}

Modulus Modulus::capped(const Modulus& base, double knee) {
  if (!(knee > 0.0) || !std::isfinite(knee)) throw SchemaError("capped modulus: knee must be positive");
  if (base.kind() == Kind::capped) throw SchemaError("capped modulus: base is already capped");
  return Modulus(Capped{std::make_shared<const Modulus>(base), knee});
}

Modulus::Kind Modulus::kind() const {
  switch (rep_.index()) {
    case 0:
      return Kind::holder;
    case 1:
      return Kind::linear;
    case 2:
      return Kind::tabulated;
    default:
      return Kind::capped;
  }
}

double Modulus::omega(double t) const {
  require_arg(t, "omega");
  switch (kind()) {
    case Kind::holder: {
      const double a = std::get<Holder>(rep_).alpha;
      return a == 1.0 ? t : std::pow(t, a);
    }
    case Kind::linear:
      return std::get<Linear>(rep_).slope * t;
    case Kind::tabulated: {
      const Table& tb = *std::get<2>(rep_);
      const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
      std::size_t i = static_cast<std::size_t>(it - tb.t.begin());
      i = std::min(i == 0 ? 0 : i - 1, tb.slope.size() - 1);
      return tb.w[i] + tb.slope[i] * (t - tb.t[i]);
    }
    case Kind::capped: {
      const auto& c = std::get<Capped>(rep_);
      return c.base->omega(std::min(t, c.knee));
    }
  }
  return 0.0;
}

double Modulus::omega_inv(double s) const {
  require_arg(s, "omega_inv");
  switch (kind()) {
    case Kind::holder: {
      const double a = std::get<Holder>(rep_).alpha;
      return a == 1.0 ? s : std::pow(s, 1.0 / a);
    }
    case Kind::linear:
      return s / std::get<Linear>(rep_).slope;
    case Kind::tabulated: {
      const Table& tb = *std::get<2>(rep_);
      const auto it = std::upper_bound(tb.w.begin(), tb.w.end(), s);
      std::size_t i = static_cast<std::size_t>(it - tb.w.begin());
      i = std::min(i == 0 ? 0 : i - 1, tb.slope.size() - 1);
      return tb.t[i] + (s - tb.w[i]) / tb.slope[i];
    }
    case Kind::capped: {
      const auto& c = std::get<Capped>(rep_);
      const double top = c.base->omega(c.knee);
      if (s > top) throw RangeExceeded("omega_inv: value beyond the range of a capped modulus");
      return std::min(c.base->omega_inv(s), c.knee);
    }
  }
  return 0.0;
}

double Modulus::phi(double t) const {
  require_arg(t, "phi");
  switch (kind()) {
    case Kind::holder: {
      const double a = std::get<Holder>(rep_).alpha;
      return std::pow(t, 1.0 + a) / (1.0 + a);
    }
    case Kind::linear:
      return 0.5 * std::get<Linear>(rep_).slope * t * t;
    case Kind::tabulated: {
      const Table& tb = *std::get<2>(rep_);
      const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
      std::size_t i = static_cast<std::size_t>(it - tb.t.begin());
      i = std::min(i == 0 ? 0 : i - 1, tb.slope.size() - 1);
      const double wt = tb.w[i] + tb.slope[i] * (t - tb.t[i]);
      return tb.phi_prefix[i] + 0.5 * (t - tb.t[i]) * (tb.w[i] + wt);
    }
    case Kind::capped: {
      const auto& c = std::get<Capped>(rep_);
      if (t <= c.knee) return c.base->phi(t);
      return c.base->phi(c.knee) + c.base->omega(c.knee) * (t - c.knee);
    }
  }
  return 0.0;
}

double Modulus::phi_star(double s) const {
  require_arg(s, "phi_star");
  switch (kind()) {
    case Kind::holder: {
      const double a = std::get<Holder>(rep_).alpha;
      const double q = 1.0 + 1.0 / a;
      return std::pow(s, q) / q;
    }
    case Kind::linear:
      return 0.5 * s * s / std::get<Linear>(rep_).slope;
    case Kind::tabulated: {
      const Table& tb = *std::get<2>(rep_);
      const auto it = std::upper_bound(tb.w.begin(), tb.w.end(), s);
      std::size_t i = static_cast<std::size_t>(it - tb.w.begin());
      i = std::min(i == 0 ? 0 : i - 1, tb.slope.size() - 1);
      const double ts = tb.t[i] + (s - tb.w[i]) / tb.slope[i];
      return tb.star_prefix[i] + 0.5 * (s - tb.w[i]) * (tb.t[i] + ts);
    }
    case Kind::capped: {
      const auto& c = std::get<Capped>(rep_);
      if (s > c.base->omega(c.knee)) {
        throw RangeExceeded("phi_star: slope beyond the range of a capped modulus");
      }
      return c.base->phi_star(s);
    }
  }
  return 0.0;
}

double Modulus::exponent() const {
  if (kind() == Kind::holder) return std::get<Holder>(rep_).alpha;
  if (kind() == Kind::linear) return 1.0;
  throw Error("modulus has no power-law exponent");
}

double Modulus::tolerance() const {
  if (kind() == Kind::tabulated) return 1e-6;
  if (kind() == Kind::capped) return base().tolerance();
  return 1e-8;
}

const std::vector<std::pair<double, double>>& Modulus::samples() const {
  static const std::vector<std::pair<double, double>> none;
  if (kind() == Kind::tabulated) return std::get<2>(rep_)->pts;
  return none;
}

const Modulus& Modulus::base() const {
  if (kind() != Kind::capped) throw Error("modulus is not capped");
  return *std::get<Capped>(rep_).base;
}

double Modulus::knee() const {
  if (kind() != Kind::capped) throw Error("modulus is not capped");
  return std::get<Capped>(rep_).knee;
}

std::string Modulus::describe() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::holder:
      os << "holder(alpha=" << exponent() << ")";
      break;
    case Kind::linear:
      os << "linear(slope=" << std::get<Linear>(rep_).slope << ")";
      break;
    case Kind::tabulated:
      os << "tabulated(" << samples().size() << " samples)";
      break;
    case Kind::capped:
      os << "capped(" << base().describe() << ", knee=" << knee() << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

SampledFunction SampledFunction::sample(const std::function<double(double)>& f, double t_max,
                                        int points) {
  if (points < 3 || !(t_max > 0.0)) throw SchemaError("sampling needs >= 3 points on (0, T]");
  SampledFunction out;
  out.t.resize(points);
  out.value.resize(points);
  for (int i = 0; i < points; ++i) {
    out.t[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    out.value[i] = f(out.t[i]);
  }
  return out;
}

namespace {

template <class Obj>
double golden_max(Obj obj, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = obj(d);
    }
  }
  return std::max(fc, fd);
}

std::size_t discrete_argmax(const SampledFunction& f, double s, double& best) {
  if (f.t.size() != f.value.size() || f.t.size() < 3) {
    throw SchemaError("conjugation needs >= 3 matching samples");
  }
  std::size_t arg = 0;
  best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.t.size(); ++i) {
    const double v = s * f.t[i] - f.value[i];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  if (arg + 1 == f.t.size()) {
    throw RangeExceeded("conjugate supremum reached the end of the sampled range; enlarge T");
  }
  return arg;
}

}  // namespace

double fenchel_conjugate_numeric(const SampledFunction& f, double s) {
  if (!std::isfinite(s)) throw DomainError("conjugate slope must be finite");
  s = std::abs(s);  // even extension
  double best = 0.0;
  const std::size_t i = discrete_argmax(f, s, best);
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t j0 = std::min(lo, f.t.size() - 3);
  const double x0 = f.t[j0], x1 = f.t[j0 + 1], x2 = f.t[j0 + 2];
  const double y0 = f.value[j0], y1 = f.value[j0 + 1], y2 = f.value[j0 + 2];
  auto quad = [&](double x) {
    return y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
           y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
           y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  };
  const double a = f.t[lo], b = f.t[i + 1];
  return std::max(best, golden_max([&](double x) { return s * x - quad(x); }, a, b));
}

double fenchel_conjugate_numeric(const std::function<double(double)>& fn, double t_max, int points,
                                 double s) {
  const SampledFunction f = SampledFunction::sample(fn, t_max, points);
  if (!std::isfinite(s)) throw DomainError("conjugate slope must be finite");
  s = std::abs(s);
  double best = 0.0;
  const std::size_t i = discrete_argmax(f, s, best);
  const double a = f.t[i == 0 ? 0 : i - 1], b = f.t[i + 1];
  return std::max(best, golden_max([&](double x) { return s * x - fn(x); }, a, b));
}

CheckReport check_modulus_identities(const Modulus& m, std::span<const double> t_samples,
                                     double tol) {
  CheckReport rep;
  rep.condition = Condition::modulus_identities;
  rep.tol = tol < 0.0 ? m.tolerance() : tol;

  double worst[6];
  std::fill(std::begin(worst), std::end(worst), std::numeric_limits<double>::infinity());
  static const char* names[6] = {"phi_lower", "phi_upper", "phi_star_lower",
                                 "phi_star_upper", "fenchel_young_equality", "omega_scaling"};

  auto put = [&](int k, double lhs, double rhs, double t) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double slack = (rhs - lhs) / scale;
    worst[k] = std::min(worst[k], slack);
    Vec w(1);
    w(0) = t;
    rep.record(slack, {w});
  };

  for (double t : t_samples) {
    if (!std::isfinite(t) || !(t > 0.0)) throw DomainError("identity samples must be finite and positive");
    const double w = m.omega(t), p = m.phi(t);
    put(0, 0.5 * t * w, p, t);
    put(1, p, t * m.omega(0.5 * t), t);
    // A capped modulus has bounded omega; the conjugate side is only defined below the cap.
    try {
      const double ps = m.phi_star(t);
      put(2, t * m.omega_inv(0.5 * t), ps, t);
      put(3, ps, 0.5 * t * m.omega_inv(t), t);
    } catch (const RangeExceeded&) {
    }
    const double lhs = p + m.phi_star(w), rhs = t * w;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double dev = -std::abs(lhs - rhs) / scale;
    worst[4] = std::min(worst[4], dev);
    {
      Vec wt(1);
      wt(0) = t;
      rep.record(dev, {wt});
    }
    for (double c : {1.0, 2.0, 5.0}) put(5, m.omega(c * t), c * w, t);
  }
  for (int k = 0; k < 6; ++k) rep.details.emplace_back(names[k], worst[k]);
  rep.constant = 0.0;
  rep.finalize();
  return rep;
}

}  // namespace jetx
