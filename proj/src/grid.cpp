#include "hjb/grid.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace hjb {

int Grid::axis_steps(int i, int axis) const {
  return static_cast<int>(std::llround(nodes[i][axis] / h));
}

int Grid::lattice_index(long i, long j) const {
  auto it = index.find({i, j});
  return it == index.end() ? -1 : it->second;
}

namespace {

std::shared_ptr<const Grid> build_interval_grid(double a, double h) {
  const long n = std::llround(a / h);
  if (n < 2) fail(ErrorKind::DegenerateGrid, "spacing too large for the interval");
  auto grid = std::make_shared<Grid>();
  grid->dim = 1;
  grid->h = a / static_cast<double>(n);  // snapped so endpoints are nodes
  const int count = static_cast<int>(2 * n + 1);
  grid->nodes.reserve(count);
  grid->neighbor.resize(count);
  grid->interior.resize(count);
  for (int i = 0; i < count; ++i) {
    const long k = i - n;
    grid->nodes.push_back(point1d(static_cast<double>(k) * grid->h));
    grid->neighbor[i][0][0] = (i > 0) ? i - 1 : -1;
    grid->neighbor[i][0][1] = (i + 1 < count) ? i + 1 : -1;
    grid->neighbor[i][1][0] = grid->neighbor[i][1][1] = -1;
    grid->interior[i] = (i > 0 && i + 1 < count);
    grid->index[{k, 0}] = i;
  }
  grid->origin = static_cast<int>(n);
  return grid;
}

std::shared_ptr<const Grid> build_disk_grid(double R, double h) {
  const long m = std::llround(R / h);
  if (m < 2) fail(ErrorKind::DegenerateGrid, "spacing too large for the disk");
  auto grid = std::make_shared<Grid>();
  grid->dim = 2;
  grid->h = R / static_cast<double>(m);
  auto& index = grid->index;
  for (long j = -m; j <= m; ++j)
    for (long i = -m; i <= m; ++i)
      if (i * i + j * j <= m * m) {
        index[{i, j}] = static_cast<int>(grid->nodes.size());
        grid->nodes.push_back(Vec2(i * grid->h, j * grid->h));
      }
  const int count = static_cast<int>(grid->nodes.size());
  grid->neighbor.resize(count);
  grid->interior.resize(count);
  auto lookup = [&](long i, long j) {
    auto it = index.find({i, j});
    return it == index.end() ? -1 : it->second;
  };
  for (const auto& [ij, id] : index) {
    const auto [i, j] = ij;
    grid->neighbor[id][0][0] = lookup(i - 1, j);
    grid->neighbor[id][0][1] = lookup(i + 1, j);
    grid->neighbor[id][1][0] = lookup(i, j - 1);
    grid->neighbor[id][1][1] = lookup(i, j + 1);
    grid->interior[id] = grid->neighbor[id][0][0] >= 0 && grid->neighbor[id][0][1] >= 0 &&
                         grid->neighbor[id][1][0] >= 0 && grid->neighbor[id][1][1] >= 0;
  }
  grid->origin = lookup(0, 0);
  return grid;
}

} // namespace

std::shared_ptr<const Grid> build_grid(const Domain& d, double h) {
  if (!(h > 0)) fail(ErrorKind::DegenerateGrid, "grid spacing must be positive");
  switch (d.kind) {
    case Domain::Kind::Interval:
      return build_interval_grid(d.scale * d.half_width, h);
    case Domain::Kind::Disk:
      return build_disk_grid(d.scale * d.radius, h);
    case Domain::Kind::RadialStar:
      fail(ErrorKind::InvalidDomain,
           "radial-star domains support geometry checks only, not grids");
  }
  fail(ErrorKind::InvalidDomain, "unknown domain kind");
}

double snap_lambda_to_lattice(const Domain& d, double h, double gamma, double lambda) {
  const double size = d.kind == Domain::Kind::Interval ? d.scale * d.half_width
                                                       : d.scale * d.radius;
  const long n = std::llround(size / h);
  const double r = gamma * lambda;
  const long target = std::llround((1.0 + r) * static_cast<double>(n));
  if (target < 2) fail(ErrorKind::InvalidScale, "lattice-compatible scale collapses the grid");
  const double r_snapped = static_cast<double>(target) / static_cast<double>(n) - 1.0;
  return gamma == 0.0 ? 0.0 : r_snapped / gamma;
}

} // namespace hjb
