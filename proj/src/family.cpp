#include <jetx/envelope.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jetx {

namespace {

// Plain Nelder-Mead in any dimension (minimisation).
std::vector<double> nelder_mead_nd(const std::function<double(const std::vector<double>&)>& f,
                                   std::vector<double> x0, double step, int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> p(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 1; i <= d; ++i) p[i][i - 1] += step;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(p[i]);
  std::vector<std::size_t> ord(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = ord.front(), worst = ord.back(), second = ord[d - 1];
    if (std::abs(fv[worst] - fv[best]) <= 1e-13 * (1.0 + std::abs(fv[best]))) break;
    std::vector<double> cen(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) cen[k] += p[i][k] / static_cast<double>(d);
    auto along = [&](double c) {
      std::vector<double> x(d);
      for (std::size_t k = 0; k < d; ++k) x[k] = cen[k] + c * (p[worst][k] - cen[k]);
      return x;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        p[worst] = xe;
        fv[worst] = fe;
      } else {
        p[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      p[worst] = xr;
      fv[worst] = fr;
    } else {
      const auto xc = fr < fv[worst] ? along(-0.5) : along(0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        p[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < d; ++k) p[i][k] = p[best][k] + 0.5 * (p[i][k] - p[best][k]);
          fv[i] = f(p[i]);
        }
      }
    }
  }
  const std::size_t b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return p[b];
}

}  // namespace

double family_F_lower_bound(const Jet& jet, const Modulus& m, double M, const Vec& x,
                            const GridSpec& constraint_grid, const FamilyBudget& budget) {
  jet.validate();
  if (!(M > 0.0)) throw DomainError("family bound needs M > 0");
  const int n = jet.dim;
  const int k = std::clamp(budget.knots, 1, 8);
  const std::size_t N = constraint_grid.num_nodes();
  std::vector<Vec> nodes(N);
  std::vector<double> g(N);
  for (std::size_t i = 0; i < N; ++i) {
    nodes[i] = constraint_grid.node(i);
    g[i] = eval_g(jet, m, M, nodes[i]);
  }

  // params: xi (n), knots (k*n), logits (k)
  auto unpack = [&](const std::vector<double>& q, Vec& xi, std::vector<Vec>& knots, std::vector<double>& lam) {
    xi = Vec(n);
    for (int i = 0; i < n; ++i) xi(i) = q[i];
    knots.assign(k, Vec(n));
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) knots[j](i) = q[n + j * n + i];
    lam.assign(k, 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) mx = std::max(mx, q[n + k * n + j]);
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += lam[j] = std::exp(q[n + k * n + j] - mx);
    for (double& l : lam) l /= s;
  };
  auto bump = [&](const Vec& z, const std::vector<Vec>& knots, const std::vector<double>& lam) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += lam[j] * M * m.phi((z - knots[j]).norm());
    return s;
  };
  auto value = [&](const std::vector<double>& q) {
    Vec xi;
    std::vector<Vec> knots;
    std::vector<double> lam;
    unpack(q, xi, knots, lam);
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) a = std::min(a, g[i] - xi.dot(nodes[i]) + bump(nodes[i], knots, lam));
    return a + xi.dot(x) - bump(x, knots, lam);
  };

  double best = -std::numeric_limits<double>::infinity();
  const double step = std::max(constraint_grid.max_spacing(), 1e-3 * std::max(1.0, jet.diameter()));
  std::vector<std::size_t> starts(jet.size());
  std::iota(starts.begin(), starts.end(), 0);
  std::stable_sort(starts.begin(), starts.end(), [&](std::size_t a, std::size_t b) {
    return (jet.points[a] - x).norm() < (jet.points[b] - x).norm();
  });
  if (budget.max_starts > 0 && starts.size() > static_cast<std::size_t>(budget.max_starts)) {
    starts.resize(static_cast<std::size_t>(budget.max_starts));
  }
  for (std::size_t y : starts) {
    std::vector<double> q(static_cast<std::size_t>(n + k * n + k), 0.0);
    for (int i = 0; i < n; ++i) q[i] = jet.gradients[y](i);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) q[n + j * n + i] = jet.points[y](i);
    best = std::max(best, value(q));
    const auto opt = nelder_mead_nd([&](const std::vector<double>& v) { return -value(v); }, q, step,
                                    budget.iterations);
    best = std::max(best, value(opt));
  }
  return best;
}

}  // namespace jetx
