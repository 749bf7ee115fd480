#include <jetx/envelope.hpp>
#include <jetx/parallel.hpp>
#include <jetx/random.hpp>

#include <algorithm>
#include <cmath>

namespace jetx {

double lp_smoothness_constant(double p, int n, long samples, std::uint64_t seed) {
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("lp exponent must lie in (1, 2]");
  if (n < 1 || n > kMaxDim) throw DomainError("lp dimension must be in 1..4");
  if (samples < 1) throw DomainError("lp smoothness needs at least one sample");
  const NormMode norm = NormMode::lp(p);
  auto ratio = [&](const Vec& u, const Vec& h) {
    const double nh = std::pow(norm.norm(h), p);
    return (std::pow(norm.norm(u + h), p) + std::pow(norm.norm(u - h), p) - 2.0 * std::pow(norm.norm(u), p)) / nh;
  };
  std::vector<double> best(static_cast<std::size_t>(samples), 0.0);
  parallel_for(best.size(), [&](std::size_t i) {
    CounterRng rng(seed, i);
    Vec u(n), h(n);
    for (int k = 0; k < n; ++k) {
      u(k) = rng.uniform(-1.0, 1.0);
      h(k) = rng.uniform(-1.0, 1.0);
    }
    h *= std::pow(10.0, rng.uniform(-2.0, 2.0));  // smaller |h| only adds cancellation noise
    if (norm.norm(h) == 0.0) h(0) = 1.0;
    best[i] = ratio(u, h);
  });
  double out = 0.0;
  for (double b : best) out = std::max(out, b);
  // u = 0 gives exactly 2 for every h.
  return std::max(out, 2.0);
}

}  // namespace jetx
