#include <jetx/grid.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetx {

NormMode NormMode::lp(double p) {
  if (!(p > 1.0 && p <= 2.0)) throw SchemaError("lp exponent must lie in (1, 2]");
  return {NormKind::lp, p};
}

double NormMode::norm(const Vec& v) const {
  if (kind == NormKind::euclidean || p == 2.0) return v.norm();
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return std::pow(s, 1.0 / p);
}

GridSpec GridSpec::make(int dim, const std::vector<double>& lo, const std::vector<double>& hi,
                        const std::vector<int>& shape) {
  if (dim < 1 || dim > kMaxDim) throw GridError("grid dimension must be in 1..4");
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
      static_cast<int>(shape.size()) != dim) {
    throw GridError("grid box and resolution must have one entry per axis");
  }
  GridSpec g;
  g.dim = dim;
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i])) {
      throw GridError("grid box must be finite and nondegenerate on every axis");
    }
    if (shape[i] < 3) throw GridError("grid needs at least 3 nodes per axis");
    g.lo[i] = lo[i];
    g.hi[i] = hi[i];
    g.shape[i] = shape[i];
  }
  return g;
}

double GridSpec::max_spacing() const {
  double h = 0.0;
  for (int i = 0; i < dim; ++i) h = std::max(h, spacing(i));
  return h;
}

double GridSpec::diameter() const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

std::size_t GridSpec::num_nodes() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(shape[i]);
  return n;
}

// Axis 0 varies fastest.
std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(shape[i]);
  return s;
}

Index GridSpec::unflatten(std::size_t idx) const {
  Index ix{0, 0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    ix[i] = static_cast<int>(idx % static_cast<std::size_t>(shape[i]));
    idx /= static_cast<std::size_t>(shape[i]);
  }
  return ix;
}

std::size_t GridSpec::flatten(const Index& ix) const {
  std::size_t idx = 0;
  for (int i = dim - 1; i >= 0; --i) idx = idx * static_cast<std::size_t>(shape[i]) + ix[i];
  return idx;
}

bool GridSpec::inside(const Index& ix) const {
  for (int i = 0; i < dim; ++i)
    if (ix[i] < 0 || ix[i] >= shape[i]) return false;
  return true;
}

Vec GridSpec::node(const Index& ix) const {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = lo[i] + ix[i] * spacing(i);
  return x;
}

Vec GridSpec::node(std::size_t idx) const { return node(unflatten(idx)); }

long long GridSpec::nearest(const Vec& x) const {
  Index ix{0, 0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    const double k = std::round((x(i) - lo[i]) / spacing(i));
    if (k < 0 || k > shape[i] - 1) return -1;
    ix[i] = static_cast<int>(k);
  }
  return static_cast<long long>(flatten(ix));
}

namespace {

// Cell origin and fractional offsets for multilinear weights.
void locate(const GridSpec& spec, const Vec& x, Index& base, std::array<double, kMaxDim>& frac) {
  for (int i = 0; i < spec.dim; ++i) {
    double u = (x(i) - spec.lo[i]) / spec.spacing(i);
    u = std::clamp(u, 0.0, static_cast<double>(spec.shape[i] - 1));
    int k = std::min(static_cast<int>(std::floor(u)), spec.shape[i] - 2);
    base[i] = k;
    frac[i] = u - k;
  }
}

}  // namespace

double GridFunction::interpolate(const Vec& x) const {
  Index base{0, 0, 0, 0};
  std::array<double, kMaxDim> frac{};
  locate(spec, x, base, frac);
  double acc = 0.0;
  for (int corner = 0; corner < (1 << spec.dim); ++corner) {
    Index ix = base;
    double w = 1.0;
    for (int i = 0; i < spec.dim; ++i) {
      const bool up = (corner >> i) & 1;
      ix[i] += up;
      w *= up ? frac[i] : 1.0 - frac[i];
    }
    if (w != 0.0) acc += w * values[spec.flatten(ix)];
  }
  return acc;
}

Vec interpolate_field(const GridSpec& spec, const std::vector<Vec>& field, const Vec& x) {
  Index base{0, 0, 0, 0};
  std::array<double, kMaxDim> frac{};
  locate(spec, x, base, frac);
  Vec acc = Vec::Zero(spec.dim);
  for (int corner = 0; corner < (1 << spec.dim); ++corner) {
    Index ix = base;
    double w = 1.0;
    for (int i = 0; i < spec.dim; ++i) {
      const bool up = (corner >> i) & 1;
      ix[i] += up;
      w *= up ? frac[i] : 1.0 - frac[i];
    }
    if (w != 0.0) acc += w * field[spec.flatten(ix)];
  }
  return acc;
}

std::vector<Vec> grid_gradient(const GridFunction& u) {
  const GridSpec& s = u.spec;
  std::vector<Vec> grad(s.num_nodes(), Vec::Zero(s.dim));
  for (std::size_t idx = 0; idx < s.num_nodes(); ++idx) {
    const Index ix = s.unflatten(idx);
    for (int a = 0; a < s.dim; ++a) {
      const std::size_t st = s.stride(a);
      const double h = s.spacing(a);
      const int k = ix[a], n = s.shape[a];
      double d;
      if (k == 0) {
        d = (-3.0 * u[idx] + 4.0 * u[idx + st] - u[idx + 2 * st]) / (2.0 * h);
      } else if (k == n - 1) {
        d = (3.0 * u[idx] - 4.0 * u[idx - st] + u[idx - 2 * st]) / (2.0 * h);
      } else {
        d = (u[idx + st] - u[idx - st]) / (2.0 * h);
      }
      grad[idx](a) = d;
    }
  }
  return grad;
}

DirectionSet axis_stencil(int dim) {
  DirectionSet out;
  for (int i = 0; i < dim; ++i) {
    Direction d{0, 0, 0, 0};
    d[i] = 1;
    out.push_back(d);
  }
  return out;
}

DirectionSet default_stencil(int dim) {
  DirectionSet out = axis_stencil(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Direction p{0, 0, 0, 0}, q{0, 0, 0, 0};
      p[i] = 1;
      p[j] = 1;
      q[i] = 1;
      q[j] = -1;
      out.push_back(p);
      out.push_back(q);
      // Knight moves: four constrained directions per plane leave the
      // Hessian norm free up to sqrt(2).
      for (int a : {1, 2}) {
        Direction u{0, 0, 0, 0}, v{0, 0, 0, 0};
        u[i] = a;
        u[j] = 3 - a;
        v[i] = a;
        v[j] = a - 3;
        out.push_back(u);
        out.push_back(v);
      }
    }
  }
  return out;
}

double direction_length(const GridSpec& spec, const Direction& d, const NormMode& norm) {
  Vec v(spec.dim);
  for (int i = 0; i < spec.dim; ++i) v(i) = d[i] * spec.spacing(i);
  return norm.norm(v);
}

std::vector<std::vector<std::size_t>> lattice_lines(const GridSpec& spec, const Direction& d) {
  std::vector<std::vector<std::size_t>> lines;
  for (std::size_t idx = 0; idx < spec.num_nodes(); ++idx) {
    Index ix = spec.unflatten(idx);
    Index prev = ix;
    for (int i = 0; i < spec.dim; ++i) prev[i] -= d[i];
    if (spec.inside(prev)) continue;  // not a line start
    std::vector<std::size_t> line;
    while (spec.inside(ix)) {
      line.push_back(spec.flatten(ix));
      for (int i = 0; i < spec.dim; ++i) ix[i] += d[i];
    }
    if (line.size() >= 3) lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace jetx
