#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace porohom {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Cartesian lattice with the same number of cells along each axis.
struct Lattice {
  int dimension = 2;
  int cells_per_axis = 0;

  std::size_t size() const;
  Index3 unravel(std::size_t linear) const;
  std::size_t ravel(const Index3& idx) const;
};

struct InclusionShape {
  enum class Kind { none, disk, square, super_ellipse };

  Kind kind = Kind::none;
  Point center{0.5, 0.5, 0.5};
  double radius = 0.0;          // disk radius or square half-width
  Point semi_axes{0.0, 0.0, 0.0};  // super-ellipse only
  double exponent = 4.0;         // super-ellipse only

  bool contains(const Point& y, int dimension) const;
  /// Half-extent of the inclusion's bounding box along `axis`.
  double half_extent(int axis) const;

  static InclusionShape none();
  static InclusionShape disk(double radius, Point center = {0.5, 0.5, 0.5});
  static InclusionShape square(double half_width,
                               Point center = {0.5, 0.5, 0.5});
};

const char* to_string(InclusionShape::Kind kind);
InclusionShape::Kind inclusion_kind_from_string(const std::string& name);

/// Staircase representation of the unit cell Y = (0,1)^n: a cell is solid
/// iff its center lies inside the inclusion.
struct CellGeometry {
  InclusionShape shape;
  Lattice lattice;
  std::vector<std::uint8_t> fluid;  // 1 = fluid, per lattice cell
  std::size_t fluid_count = 0;
  double porosity = 1.0;

  int dimension() const { return lattice.dimension; }
  int resolution() const { return lattice.cells_per_axis; }
  double spacing() const { return 1.0 / resolution(); }
  bool is_fluid(std::size_t cell) const { return fluid[cell] != 0; }
  /// Number of fluid-solid faces of the unit cell (staircase Γ).
  std::size_t interface_face_count() const;
  /// Staircase measure of Γ in cell coordinates.
  double interface_measure() const;
};

CellGeometry build_cell_geometry(const InclusionShape& shape, int resolution,
                                 int dimension = 2);

struct InteriorFace {
  int lo;   // compact fluid index
  int hi;   // compact fluid index, lo + e_dir on the lattice
  int dir;
};

struct BoundaryFace {
  int cell;   // compact fluid index
  int dir;
  int side;   // +1: face on the high side of the cell, -1: low side
  Point x;    // face midpoint in Ω
  Point y;    // face midpoint in the periodicity cell (x/ε mod 1)
};

/// Perforated domain Ω_ε ⊂ (0,1)^n as a masked Cartesian grid. Unknowns live
/// on fluid cells only and are addressed by a compact index.
class MaskedGrid {
 public:
  int dimension() const { return lattice_.dimension; }
  int m() const { return m_; }
  int r() const { return r_; }
  int cells_per_axis() const { return lattice_.cells_per_axis; }
  double epsilon() const { return 1.0 / m_; }
  double spacing() const { return spacing_; }
  double cell_volume() const { return cell_volume_; }
  double face_area() const { return face_area_; }
  const Lattice& lattice() const { return lattice_; }

  std::size_t total_cells() const { return lattice_.size(); }
  std::size_t fluid_cells() const { return cell_of_compact_.size(); }
  /// Compact index of a lattice cell, -1 when solid.
  int compact(std::size_t cell) const { return compact_of_cell_[cell]; }
  std::size_t lattice_cell(int compact) const {
    return cell_of_compact_[static_cast<std::size_t>(compact)];
  }
  /// Compact index of the neighbor in ±dir, -1 when solid or outside Ω.
  int neighbor(int compact, int dir, int side) const;
  Point center(int compact) const;
  /// Index of the matching cell in the periodicity cell lattice.
  std::size_t unit_cell_index(int compact) const;

  const std::vector<InteriorFace>& interior_faces() const { return interior_; }
  const std::vector<BoundaryFace>& hole_faces() const { return hole_; }
  const std::vector<BoundaryFace>& outer_faces() const { return outer_; }
  std::size_t solid_solid_faces() const { return solid_solid_; }

  double fluid_volume() const { return cell_volume_ * fluid_cells(); }
  double hole_area() const { return face_area_ * hole_.size(); }
  double outer_area() const { return face_area_ * outer_.size(); }

 private:
  friend MaskedGrid build_masked_grid(const CellGeometry&, int, int);

  Lattice lattice_;
  Lattice unit_lattice_;
  int m_ = 1;
  int r_ = 1;
  double spacing_ = 1.0;
  double cell_volume_ = 1.0;
  double face_area_ = 1.0;
  std::vector<int> compact_of_cell_;
  std::vector<std::size_t> cell_of_compact_;
  std::vector<int> neighbors_;  // 2*dim entries per compact cell
  std::vector<InteriorFace> interior_;
  std::vector<BoundaryFace> hole_;
  std::vector<BoundaryFace> outer_;
  std::size_t solid_solid_ = 0;
};

MaskedGrid build_masked_grid(const CellGeometry& cell, int m, int r);

/// Unperforated grid of `cells_per_axis`^n cells on Ω.
MaskedGrid build_uniform_grid(int dimension, int cells_per_axis);

/// ξ1(x, y) on Γ_ε and ξ2(x) on ∂Ω. The `y` argument of ξ2 is unused.
using SurfaceFunction = std::function<double(const Point& x, const Point& y)>;

struct SurfaceCharges {
  std::vector<double> hole;   // ε·ξ1(x, x/ε mod 1), per hole face
  std::vector<double> outer;  // ξ2(x), per outer face
  double xi_star = 0.0;

  /// Σ value·area over every boundary facet.
  double total(const MaskedGrid& grid) const;
};

SurfaceCharges surface_charge_on_facets(const MaskedGrid& grid,
                                        const SurfaceFunction& xi1,
                                        const SurfaceFunction& xi2);

}  // namespace porohom
