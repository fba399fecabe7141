#pragma once
// Uniform lattices covering a domain: axis-aligned nodes, neighbor tables,
// boundary/interior masks, and the lattice-compatibility helpers used when
// two dilated domains must share a grid.

#include "hjb/domain.hpp"
#include "hjb/types.hpp"

#include <array>
#include <map>
#include <memory>
#include <vector>

namespace hjb {

struct Grid {
  int dim = 1;
  double h = 0.0;
  std::vector<Vec2> nodes;
  // neighbor[i][axis][dir]: node id one step along axis (dir 0: -h, 1: +h), -1 off grid.
  std::vector<std::array<std::array<int, 2>, 2>> neighbor;
  std::vector<bool> interior;  // all 2*dim axis neighbors present
  int origin = -1;
  std::map<std::pair<long, long>, int> index;  // lattice steps -> node id

  int size() const { return static_cast<int>(nodes.size()); }
  bool boundary(int i) const { return !interior[i]; }
  int axis_steps(int i, int axis) const;  // lattice index along axis
  int lattice_index(long i, long j) const;  // -1 when off grid
};

// Builds a lattice covering the closure of the domain. The spacing is snapped
// to the nearest value dividing the domain size exactly, so interval grids
// contain both endpoints and the origin as nodes. Throws DegenerateGrid when
// fewer than two cells fit, and InvalidDomain for radial-star domains (those
// are supported for geometry checks only).
std::shared_ptr<const Grid> build_grid(const Domain& d, double h);

// Nearest lambda to `lambda` such that (1 + gamma*lambda) scales the domain
// onto the same h-lattice (integer node count). Used by the eigenvalue curves
// to avoid regridding artifacts.
double snap_lambda_to_lattice(const Domain& d, double h, double gamma, double lambda);

} // namespace hjb
