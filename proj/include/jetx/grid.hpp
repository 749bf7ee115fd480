#pragma once

#include <jetx/types.hpp>

#include <array>
#include <cstddef>
#include <vector>

namespace jetx {

enum class NormKind { euclidean, lp };

struct NormMode {
  NormKind kind = NormKind::euclidean;
  double p = 2.0;

  static NormMode euclidean() { return {}; }
  static NormMode lp(double p);
  double norm(const Vec& v) const;
};

using Index = std::array<int, kMaxDim>;

/// Regular box grid. Node k along axis i sits at lo[i] + k * spacing(i).
struct GridSpec {
  int dim = 1;
  std::array<double, kMaxDim> lo{}, hi{};
  std::array<int, kMaxDim> shape{1, 1, 1, 1};

  static GridSpec make(int dim, const std::vector<double>& lo, const std::vector<double>& hi,
                       const std::vector<int>& shape);

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (shape[axis] - 1); }
  double max_spacing() const;
  double diameter() const;
  std::size_t num_nodes() const;
  std::size_t stride(int axis) const;

  Index unflatten(std::size_t idx) const;
  std::size_t flatten(const Index& ix) const;
  bool inside(const Index& ix) const;
  Vec node(std::size_t idx) const;
  Vec node(const Index& ix) const;

  /// Nearest node to x, or -1 when x lies outside the box by more than half a cell.
  long long nearest(const Vec& x) const;
};

/// Scalar field on a GridSpec.
struct GridFunction {
  GridSpec spec;
  std::vector<double> values;
  NormMode norm;

  GridFunction() = default;
  GridFunction(GridSpec s, NormMode n = {}) : spec(s), values(s.num_nodes(), 0.0), norm(n) {}

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double at(const Index& ix) const { return values[spec.flatten(ix)]; }

  /// Multilinear interpolation; x must lie in the box (clamped otherwise).
  double interpolate(const Vec& x) const;
};

/// Per-node gradient by second-order central differences, one-sided
/// second-order stencils on the box faces.
std::vector<Vec> grid_gradient(const GridFunction& u);

/// Multilinear interpolation of a vector field stored per node.
Vec interpolate_field(const GridSpec& spec, const std::vector<Vec>& field, const Vec& x);

/// Lattice direction with integer offsets.
using Direction = std::array<int, kMaxDim>;
using DirectionSet = std::vector<Direction>;

/// Coordinate axes and, for n >= 2, face diagonals e_i +- e_j and the
/// knight moves e_i +- 2e_j, 2e_i +- e_j in every coordinate plane.
DirectionSet default_stencil(int dim);
DirectionSet axis_stencil(int dim);

/// Physical length of a lattice direction under the given norm.
double direction_length(const GridSpec& spec, const Direction& d, const NormMode& norm);

/// All maximal lattice lines along d: node sequences x0, x0+d, x0+2d, ...
/// Lines with fewer than three nodes are omitted.
std::vector<std::vector<std::size_t>> lattice_lines(const GridSpec& spec, const Direction& d);

}  // namespace jetx
