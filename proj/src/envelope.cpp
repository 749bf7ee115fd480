#include <jetx/envelope.hpp>
#include <jetx/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace jetx {

double eval_m(const Jet& jet, const Modulus& m, double M, const Vec& x, const NormMode& norm) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < jet.size(); ++i) {
    const Vec d = x - jet.points[i];
    best = std::max(best, jet.values[i] + jet.gradients[i].dot(d) - M * m.phi(norm.norm(d)));
  }
  return best;
}

double eval_g(const Jet& jet, const Modulus& m, double M, const Vec& x, const NormMode& norm) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < jet.size(); ++i) {
    const Vec d = x - jet.points[i];
    best = std::min(best, jet.values[i] + jet.gradients[i].dot(d) + M * m.phi(norm.norm(d)));
  }
  return best;
}

namespace {

struct DirectionData {
  std::vector<std::vector<std::size_t>> lines;
  std::vector<std::int32_t> line_of;  // node -> line index, -1 when on no line
  std::vector<double> weight;         // weight[n] = C phi(n |d|) / n^2
};

std::vector<DirectionData> prepare(const GridSpec& spec, const NormMode& norm, double C, const Modulus& m,
                                   const DirectionSet& stencil) {
  std::vector<DirectionData> out(stencil.size());
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    DirectionData& dd = out[k];
    dd.lines = lattice_lines(spec, stencil[k]);
    dd.line_of.assign(spec.num_nodes(), -1);
    std::size_t longest = 0;
    for (std::size_t l = 0; l < dd.lines.size(); ++l) {
      longest = std::max(longest, dd.lines[l].size());
      for (std::size_t node : dd.lines[l]) dd.line_of[node] = static_cast<std::int32_t>(l);
    }
    const double len = direction_length(spec, stencil[k], norm);
    dd.weight.assign(longest + 1, 0.0);
    for (std::size_t n = 2; n <= longest; ++n) {
      const double nn = static_cast<double>(n);
      dd.weight[n] = C * m.phi(nn * len) / (nn * nn);
    }
  }
  return out;
}

// All chords of one line applied in place; values only decrease and never
// fall below the floor.
void relax_line(double* __restrict v, const double* __restrict fl, std::size_t L, const double* w) {
  for (std::size_t j = 0; j + 2 < L; ++j) {
    const double a = v[j];
    for (std::size_t k = j + 2; k < L; ++k) {
      const std::size_t n = k - j;
      const double b = (v[k] - a) / static_cast<double>(n);
      const double wn = w[n];
      double* __restrict out = v + j;
      const double* __restrict f = fl + j;
      for (std::size_t t = 1; t < n; ++t) {
        const double td = static_cast<double>(t);
        const double c = a + td * b + td * static_cast<double>(n - t) * wn;
        out[t] = std::min(out[t], std::max(c, f[t]));
      }
    }
  }
}

// Jacobi variant: candidates from `v` only, minimum written into `out`.
void jacobi_line(const double* v, const double* fl, double* out, std::size_t L, const double* w) {
  for (std::size_t j = 0; j + 2 < L; ++j) {
    const double a = v[j];
    for (std::size_t k = j + 2; k < L; ++k) {
      const std::size_t n = k - j;
      const double b = (v[k] - a) / static_cast<double>(n);
      const double wn = w[n];
      for (std::size_t t = 1; t < n; ++t) {
        const double td = static_cast<double>(t);
        const double c = a + td * b + td * static_cast<double>(n - t) * wn;
        out[j + t] = std::min(out[j + t], std::max(c, fl[j + t]));
      }
    }
  }
}

// Largest L-Lipschitz minorant (Euclidean) of u, clamped below by floor.
void lipschitz_minorant(GridFunction& u, const GridFunction& floor, double L) {
  const GridSpec& s = u.spec;
  const std::size_t N = s.num_nodes();
  if (s.dim == 1) {
    const double h = s.spacing(0);
    for (std::size_t i = 1; i < N; ++i) u[i] = std::min(u[i], u[i - 1] + L * h);
    for (std::size_t i = N - 1; i-- > 0;) u[i] = std::min(u[i], u[i + 1] + L * h);
  } else {
    std::vector<Vec> pos(N);
    for (std::size_t i = 0; i < N; ++i) pos[i] = s.node(i);
    const std::vector<double> old = u.values;
    parallel_for(N, [&](std::size_t i) {
      double best = old[i];
      for (std::size_t k = 0; k < N; ++k) best = std::min(best, old[k] + L * (pos[i] - pos[k]).norm());
      u[i] = best;
    });
  }
  for (std::size_t i = 0; i < N; ++i) u[i] = std::max(u[i], floor[i]);
}

double jacobi_residual(const GridFunction& u, const GridFunction& floor,
                       const std::vector<DirectionData>& dirs, double lip) {
  const std::size_t N = u.values.size();
  std::vector<double> tu = u.values;
  for (const DirectionData& dd : dirs) {
    parallel_for(dd.lines.size(), [&](std::size_t l) {
      const auto& line = dd.lines[l];
      const std::size_t L = line.size();
      std::vector<double> v(L), fl(L), out(L);
      for (std::size_t i = 0; i < L; ++i) {
        v[i] = u[line[i]];
        fl[i] = floor[line[i]];
        out[i] = tu[line[i]];
      }
      jacobi_line(v.data(), fl.data(), out.data(), L, dd.weight.data());
      for (std::size_t i = 0; i < L; ++i) tu[line[i]] = out[i];
    });
  }
  double res = 0.0;
  for (std::size_t i = 0; i < N; ++i) res = std::max(res, u[i] - tu[i]);
  if (std::isfinite(lip)) {
    GridFunction c = u;
    lipschitz_minorant(c, floor, lip);
    for (std::size_t i = 0; i < N; ++i) res = std::max(res, u[i] - c[i]);
  }
  return res;
}

}  // namespace

double envelope_residual(const GridFunction& u, const GridFunction& floor, double C, const Modulus& m,
                         const DirectionSet& stencil) {
  const auto dirs = prepare(u.spec, u.norm, C, m, stencil);
  return jacobi_residual(u, floor, dirs, std::numeric_limits<double>::infinity());
}

GridFunction paraconvex_envelope_grid(const GridFunction& u0, const GridFunction& floor_in, double C,
                                      const Modulus& m, const DirectionSet& stencil, double eps,
                                      EnvelopeStats* stats, double lipschitz_cap, long max_rounds) {
  if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("envelope constant C must be positive");
  if (!(eps > 0.0)) throw DomainError("envelope tolerance must be positive");
  const GridSpec& spec = u0.spec;
  const std::size_t N = spec.num_nodes();
  if (floor_in.values.size() != N || u0.values.size() != N) throw GridError("envelope inputs differ in size");

  double scale = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(u0[i]) || !std::isfinite(floor_in[i])) throw Error("envelope input is not finite");
    scale = std::max({scale, std::abs(u0[i]), std::abs(floor_in[i])});
  }
  GridFunction floor = floor_in;
  for (std::size_t i = 0; i < N; ++i) {
    if (u0[i] < floor[i] - 1e-12 * std::max(1.0, scale)) {
      throw Error("envelope input lies below its floor at node " + std::to_string(i));
    }
    floor[i] = std::min(floor[i], u0[i]);
  }

  const auto dirs = prepare(spec, u0.norm, C, m, stencil);
  GridFunction u = u0;
  EnvelopeStats st;
  const double mark = 1e-2 * eps;
  std::vector<std::vector<char>> dirty(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) dirty[k].assign(dirs[k].lines.size(), 1);

  auto mark_node = [&](std::size_t node) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const std::int32_t l = dirs[k].line_of[node];
      if (l >= 0) dirty[k][static_cast<std::size_t>(l)] = 1;
    }
  };

  std::vector<double> v, fl;
  while (true) {
    double change = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const DirectionData& dd = dirs[k];
      for (std::size_t l = 0; l < dd.lines.size(); ++l) {
        if (!dirty[k][l]) continue;
        dirty[k][l] = 0;
        const auto& line = dd.lines[l];
        const std::size_t L = line.size();
        v.resize(L);
        fl.resize(L);
        for (std::size_t i = 0; i < L; ++i) {
          v[i] = u[line[i]];
          fl[i] = floor[line[i]];
        }
        relax_line(v.data(), fl.data(), L, dd.weight.data());
        ++st.line_updates;
        for (std::size_t i = 0; i < L; ++i) {
          const std::size_t node = line[i];
          const double d = u[node] - v[i];
          if (!(d >= 0.0)) {
            if (d < 0.0 && d > -1e-14 * std::max(1.0, scale)) continue;
            throw ConvergenceError("non-monotone envelope iterate", std::abs(d));
          }
          if (d > 0.0) {
            u[node] = v[i];
            change = std::max(change, d);
            if (d > mark) {
              mark_node(node);
              any = true;
            }
          }
        }
      }
    }
    if (std::isfinite(lipschitz_cap)) {
      const std::vector<double> before = u.values;
      lipschitz_minorant(u, floor, lipschitz_cap);
      for (std::size_t i = 0; i < N; ++i) {
        const double d = before[i] - u[i];
        change = std::max(change, d);
        if (d > mark) {
          mark_node(i);
          any = true;
        }
      }
    }
    ++st.rounds;
    if (change < eps || !any) {
      st.residual = jacobi_residual(u, floor, dirs, lipschitz_cap);
      if (st.residual < eps) break;
      for (auto& dk : dirty) std::fill(dk.begin(), dk.end(), 1);
    }
    if (st.rounds >= max_rounds) {
      st.residual = jacobi_residual(u, floor, dirs, lipschitz_cap);
      if (stats) *stats = st;
      throw ConvergenceError("envelope did not converge within the sweep cap", st.residual);
    }
  }
  for (std::size_t i = 0; i < N; ++i)
    if (u0[i] - u[i] > eps) ++st.changed;
  if (stats) *stats = st;
  return u;
}

// ---------------------------------------------------------------------------

std::vector<double> lower_hull_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (ys.size() != n || n == 0) throw SchemaError("lower hull needs matching nonempty inputs");
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(xs[i] > xs[i - 1])) throw SchemaError("lower hull abscissae must increase");
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      // drop b when it lies on or above the chord a -> i
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && hull[seg + 1] < i) ++seg;
    if (seg + 1 >= hull.size() || hull[seg] == i) {
      out[i] = ys[i];
      continue;
    }
    const std::size_t a = hull[seg], b = hull[seg + 1];
    const double lam = (xs[i] - xs[a]) / (xs[b] - xs[a]);
    out[i] = std::min(ys[i], (1.0 - lam) * ys[a] + lam * ys[b]);
  }
  return out;
}

std::vector<double> discrete_legendre(const std::vector<double>& xs, const std::vector<double>& ys,
                                      const std::vector<double>& slopes) {
  if (xs.size() != ys.size() || xs.empty()) throw SchemaError("Legendre transform needs matching inputs");
  std::vector<double> out(slopes.size());
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, slopes[k] * xs[i] - ys[i]);
    out[k] = best;
  }
  return out;
}

}  // namespace jetx
