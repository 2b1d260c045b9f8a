#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "error.hpp"

namespace porohom {

std::size_t Lattice::size() const {
  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) total *= static_cast<std::size_t>(cells_per_axis);
  return total;
}

Index3 Lattice::unravel(std::size_t linear) const {
  Index3 idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(cells_per_axis);
  for (int d = 0; d < dimension; ++d) {
    idx[d] = static_cast<int>(linear % n);
    linear /= n;
  }
  return idx;
}

std::size_t Lattice::ravel(const Index3& idx) const {
  std::size_t linear = 0;
  const auto n = static_cast<std::size_t>(cells_per_axis);
  for (int d = dimension - 1; d >= 0; --d) linear = linear * n + static_cast<std::size_t>(idx[d]);
  return linear;
}

bool InclusionShape::contains(const Point& y, int dimension) const {
  switch (kind) {
    case Kind::none:
      return false;
    case Kind::disk: {
      double r2 = 0.0;
      for (int d = 0; d < dimension; ++d) r2 += (y[d] - center[d]) * (y[d] - center[d]);
      return r2 < radius * radius;
    }
    case Kind::square: {
      for (int d = 0; d < dimension; ++d)
        if (std::abs(y[d] - center[d]) >= radius) return false;
      return true;
    }
    case Kind::super_ellipse: {
      double s = 0.0;
      for (int d = 0; d < dimension; ++d)
        s += std::pow(std::abs(y[d] - center[d]) / semi_axes[d], exponent);
      return s < 1.0;
    }
  }
  return false;
}

double InclusionShape::half_extent(int axis) const {
  switch (kind) {
    case Kind::none: return 0.0;
    case Kind::disk:
    case Kind::square: return radius;
    case Kind::super_ellipse: return semi_axes[axis];
  }
  return 0.0;
}

InclusionShape InclusionShape::none() { return {}; }

InclusionShape InclusionShape::disk(double radius, Point center) {
  InclusionShape s;
  s.kind = Kind::disk;
  s.radius = radius;
  s.center = center;
  return s;
}

InclusionShape InclusionShape::square(double half_width, Point center) {
  InclusionShape s;
  s.kind = Kind::square;
  s.radius = half_width;
  s.center = center;
  return s;
}

const char* to_string(InclusionShape::Kind kind) {
  switch (kind) {
    case InclusionShape::Kind::none: return "none";
    case InclusionShape::Kind::disk: return "disk";
    case InclusionShape::Kind::square: return "square";
    case InclusionShape::Kind::super_ellipse: return "super_ellipse";
  }
  return "none";
}

InclusionShape::Kind inclusion_kind_from_string(const std::string& name) {
  if (name == "none") return InclusionShape::Kind::none;
  if (name == "disk") return InclusionShape::Kind::disk;
  if (name == "square") return InclusionShape::Kind::square;
  if (name == "super_ellipse") return InclusionShape::Kind::super_ellipse;
  throw ConfigError("unknown inclusion kind '" + name + "'");
}

namespace {

// Fluid cells reachable from `seed` through shared faces, without wrap.
std::size_t flood_fill(const Lattice& lattice, const std::vector<std::uint8_t>& fluid,
                       std::size_t seed) {
  std::vector<std::uint8_t> seen(fluid.size(), 0);
  std::deque<std::size_t> queue{seed};
  seen[seed] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t cell = queue.front();
    queue.pop_front();
    ++reached;
    const Index3 idx = lattice.unravel(cell);
    for (int d = 0; d < lattice.dimension; ++d) {
      for (int side : {-1, 1}) {
        Index3 nb = idx;
        nb[d] += side;
        if (nb[d] < 0 || nb[d] >= lattice.cells_per_axis) continue;
        const std::size_t next = lattice.ravel(nb);
        if (!fluid[next] || seen[next]) continue;
        seen[next] = 1;
        queue.push_back(next);
      }
    }
  }
  return reached;
}

}  // namespace

std::size_t CellGeometry::interface_face_count() const {
  std::size_t count = 0;
  const int n = resolution();
  for (std::size_t cell = 0; cell < lattice.size(); ++cell) {
    const Index3 idx = lattice.unravel(cell);
    for (int d = 0; d < dimension(); ++d) {
      Index3 nb = idx;
      nb[d] = (nb[d] + 1) % n;
      if (fluid[cell] != fluid[lattice.ravel(nb)]) ++count;
    }
  }
  return count;
}

double CellGeometry::interface_measure() const {
  return static_cast<double>(interface_face_count()) *
         std::pow(spacing(), dimension() - 1);
}

CellGeometry build_cell_geometry(const InclusionShape& shape, int resolution,
                                 int dimension) {
  if (dimension != 2 && dimension != 3)
    throw Error(ErrorKind::geometry, "dimension must be 2 or 3");
  if (resolution < 4)
    throw Error(ErrorKind::geometry, "cell resolution must be at least 4");

  if (shape.kind != InclusionShape::Kind::none) {
    const double margin = 2.0 / resolution;
    for (int d = 0; d < dimension; ++d) {
      const double extent = shape.half_extent(d);
      if (!(extent > 0.0))
        throw Error(ErrorKind::geometry, "inclusion size must be positive");
      const double gap = std::min(shape.center[d] - extent, 1.0 - shape.center[d] - extent);
      if (gap < margin - 1e-12)
        throw Error(ErrorKind::geometry,
                    "inclusion touches the cell boundary: gap " + std::to_string(gap) +
                        " < margin " + std::to_string(margin));
    }
  }

  CellGeometry cell;
  cell.shape = shape;
  cell.lattice = Lattice{dimension, resolution};
  cell.fluid.assign(cell.lattice.size(), 1);
  const double h = 1.0 / resolution;
  for (std::size_t c = 0; c < cell.lattice.size(); ++c) {
    const Index3 idx = cell.lattice.unravel(c);
    Point y{0.5, 0.5, 0.5};
    for (int d = 0; d < dimension; ++d) y[d] = (idx[d] + 0.5) * h;
    if (shape.contains(y, dimension)) cell.fluid[c] = 0;
  }
  cell.fluid_count = static_cast<std::size_t>(std::count(cell.fluid.begin(), cell.fluid.end(), 1));
  cell.porosity = static_cast<double>(cell.fluid_count) / static_cast<double>(cell.lattice.size());

  // The corner cell is fluid whenever the margin check passed.
  if (cell.fluid_count == 0 || !cell.fluid[0])
    throw Error(ErrorKind::geometry, "fluid region is empty");
  if (flood_fill(cell.lattice, cell.fluid, 0) != cell.fluid_count)
    throw Error(ErrorKind::geometry, "fluid region of the cell is disconnected");
  return cell;
}

int MaskedGrid::neighbor(int compact, int dir, int side) const {
  const std::size_t slot = static_cast<std::size_t>(compact) * 2 * dimension() +
                           static_cast<std::size_t>(2 * dir + (side > 0 ? 1 : 0));
  return neighbors_[slot];
}

Point MaskedGrid::center(int compact) const {
  const Index3 idx = lattice_.unravel(lattice_cell(compact));
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < dimension(); ++d) x[d] = (idx[d] + 0.5) * spacing_;
  return x;
}

std::size_t MaskedGrid::unit_cell_index(int compact) const {
  Index3 idx = lattice_.unravel(lattice_cell(compact));
  for (int d = 0; d < dimension(); ++d) idx[d] %= r_;
  return unit_lattice_.ravel(idx);
}

MaskedGrid build_masked_grid(const CellGeometry& cell, int m, int r) {
  if (m < 1) throw Error(ErrorKind::alignment, "m must be at least 1");
  if (r != cell.resolution())
    throw Error(ErrorKind::alignment,
                "micro resolution r=" + std::to_string(r) +
                    " does not match the cell resolution " +
                    std::to_string(cell.resolution()));

  const int dim = cell.dimension();
  const int n = m * r;
  MaskedGrid grid;
  grid.lattice_ = Lattice{dim, n};
  grid.unit_lattice_ = cell.lattice;
  grid.m_ = m;
  grid.r_ = r;
  grid.spacing_ = 1.0 / n;
  grid.cell_volume_ = std::pow(grid.spacing_, dim);
  grid.face_area_ = std::pow(grid.spacing_, dim - 1);

  const std::size_t total = grid.lattice_.size();
  grid.compact_of_cell_.assign(total, -1);
  for (std::size_t c = 0; c < total; ++c) {
    Index3 idx = grid.lattice_.unravel(c);
    for (int d = 0; d < dim; ++d) idx[d] %= r;
    if (cell.is_fluid(cell.lattice.ravel(idx))) {
      grid.compact_of_cell_[c] = static_cast<int>(grid.cell_of_compact_.size());
      grid.cell_of_compact_.push_back(c);
    }
  }

  const std::size_t fluid = grid.cell_of_compact_.size();
  grid.neighbors_.assign(fluid * 2 * dim, -1);
  const double h = grid.spacing_;

  auto make_boundary = [&](int compact, const Index3& idx, int dir, int side) {
    BoundaryFace face{compact, dir, side, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    for (int d = 0; d < dim; ++d) {
      const int local = idx[d] % r;
      if (d == dir) {
        const int offset = side > 0 ? 1 : 0;
        face.x[d] = (idx[d] + offset) * h;
        face.y[d] = static_cast<double>(local + offset) / r;
      } else {
        face.x[d] = (idx[d] + 0.5) * h;
        face.y[d] = (local + 0.5) / r;
      }
    }
    return face;
  };

  for (std::size_t c = 0; c < total; ++c) {
    const Index3 idx = grid.lattice_.unravel(c);
    const int self = grid.compact_of_cell_[c];
    for (int d = 0; d < dim; ++d) {
      if (idx[d] == 0 && self >= 0) grid.outer_.push_back(make_boundary(self, idx, d, -1));
      if (idx[d] == 0 && self < 0)
        throw Error(ErrorKind::geometry, "solid cell touches the outer boundary");
      if (idx[d] + 1 == n) {
        if (self < 0) throw Error(ErrorKind::geometry, "solid cell touches the outer boundary");
        grid.outer_.push_back(make_boundary(self, idx, d, +1));
        continue;
      }
      Index3 nb = idx;
      nb[d] += 1;
      const int other = grid.compact_of_cell_[grid.lattice_.ravel(nb)];
      if (self >= 0 && other >= 0) {
        grid.interior_.push_back({self, other, d});
        grid.neighbors_[static_cast<std::size_t>(self) * 2 * dim + 2 * d + 1] = other;
        grid.neighbors_[static_cast<std::size_t>(other) * 2 * dim + 2 * d] = self;
      } else if (self >= 0) {
        grid.hole_.push_back(make_boundary(self, idx, d, +1));
      } else if (other >= 0) {
        grid.hole_.push_back(make_boundary(other, nb, d, -1));
      } else {
        ++grid.solid_solid_;
      }
    }
  }
  return grid;
}

MaskedGrid build_uniform_grid(int dimension, int cells_per_axis) {
  return build_masked_grid(
      build_cell_geometry(InclusionShape::none(), cells_per_axis, dimension), 1,
      cells_per_axis);
}

double SurfaceCharges::total(const MaskedGrid& grid) const {
  double sum = 0.0;
  for (double v : hole) sum += v;
  for (double v : outer) sum += v;
  return sum * grid.face_area();
}

SurfaceCharges surface_charge_on_facets(const MaskedGrid& grid,
                                        const SurfaceFunction& xi1,
                                        const SurfaceFunction& xi2) {
  SurfaceCharges q;
  const double eps = grid.epsilon();
  q.hole.reserve(grid.hole_faces().size());
  for (const auto& f : grid.hole_faces()) {
    const double v = eps * xi1(f.x, f.y);
    q.hole.push_back(v);
    q.xi_star = std::max(q.xi_star, std::abs(v));
  }
  q.outer.reserve(grid.outer_faces().size());
  for (const auto& f : grid.outer_faces()) {
    const double v = xi2(f.x, f.y);
    q.outer.push_back(v);
    q.xi_star = std::max(q.xi_star, std::abs(v));
  }
  return q;
}

}  // namespace porohom
