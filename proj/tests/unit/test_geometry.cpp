#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "geometry.hpp"

using namespace porohom;

TEST(CellGeometry, NoInclusionIsAllFluid) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::none(), 32);
  EXPECT_EQ(cell.fluid_count, 32u * 32u);
  EXPECT_DOUBLE_EQ(cell.porosity, 1.0);
  EXPECT_EQ(cell.interface_face_count(), 0u);
}

TEST(CellGeometry, DiskPorosityApproachesAnalyticArea) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 256);
  EXPECT_NEAR(cell.porosity, 1.0 - std::numbers::pi * 0.0625, 0.01);
}

TEST(CellGeometry, RejectsInclusionTouchingBoundary) {
  try {
    build_cell_geometry(InclusionShape::disk(0.49), 32);
    FAIL() << "margin violation accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::geometry);
  }
}

TEST(CellGeometry, RejectsTooCoarseResolution) {
  EXPECT_THROW(build_cell_geometry(InclusionShape::none(), 3), Error);
}

TEST(CellGeometry, ThreeDimensionalDisk) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 16, 3);
  EXPECT_EQ(cell.lattice.size(), 16u * 16u * 16u);
  EXPECT_NEAR(cell.porosity, 1.0 - 4.0 / 3.0 * std::numbers::pi * std::pow(0.25, 3), 0.02);
}

TEST(MaskedGrid, CountsWithoutInclusion) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::none(), 8);
  const MaskedGrid g = build_masked_grid(cell, 4, 8);
  EXPECT_EQ(g.total_cells(), 1024u);
  EXPECT_EQ(g.fluid_cells(), 1024u);
  EXPECT_EQ(g.hole_faces().size(), 0u);
  EXPECT_EQ(g.outer_faces().size(), 128u);
  EXPECT_DOUBLE_EQ(g.epsilon(), 0.25);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0 / 32.0);
}

TEST(MaskedGrid, AlignmentError) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  try {
    build_masked_grid(cell, 2, 16);
    FAIL() << "misaligned grid accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::alignment);
  }
}

TEST(MaskedGrid, HoleAreaDoublesWithM) {
  // Facet enumeration oracle: 64 facets (area 4) at m=2, 256 (area 8) at m=4.
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g2 = build_masked_grid(cell, 2, 8);
  const MaskedGrid g4 = build_masked_grid(cell, 4, 8);
  EXPECT_EQ(g2.hole_faces().size(), 64u);
  EXPECT_EQ(g4.hole_faces().size(), 256u);
  EXPECT_NEAR(g4.hole_area() / g2.hole_area(), 2.0, 0.02);
}

TEST(MaskedGrid, SingleCellMatchesStaircasePerimeter) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 32);
  const MaskedGrid g = build_masked_grid(cell, 1, 32);
  EXPECT_EQ(g.hole_faces().size(), cell.interface_face_count());
  EXPECT_EQ(g.hole_faces().size(), 64u);
}

TEST(MaskedGrid, StaircasePerimeterIsTheL1Perimeter) {
  for (int r : {64, 256}) {
    const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), r);
    EXPECT_DOUBLE_EQ(cell.interface_measure(), 8.0 * 0.25);
  }
}

TEST(MaskedGrid, MaskIsPeriodic) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.2, {0.45, 0.55, 0.5}), 10);
  const MaskedGrid g = build_masked_grid(cell, 3, 10);
  const Lattice& lat = g.lattice();
  for (std::size_t c = 0; c < lat.size(); ++c) {
    Index3 idx = lat.unravel(c);
    for (int d = 0; d < 2; ++d) idx[d] %= 10;
    EXPECT_EQ(g.compact(c) >= 0, cell.is_fluid(cell.lattice.ravel(idx)));
  }
}

TEST(MaskedGrid, VolumeConsistency) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g = build_masked_grid(cell, 4, 8);
  const std::size_t solid_per_cell = cell.lattice.size() - cell.fluid_count;
  EXPECT_DOUBLE_EQ(g.fluid_volume(), 1.0 - 16.0 * solid_per_cell * g.cell_volume());
}

TEST(MaskedGrid, FacetPartition) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g = build_masked_grid(cell, 3, 8);
  const std::size_t n = 24;
  EXPECT_EQ(g.interior_faces().size() + g.hole_faces().size() + g.solid_solid_faces(),
            2 * n * (n - 1));
  EXPECT_EQ(g.outer_faces().size(), 4 * n);
  for (const auto& f : g.hole_faces()) EXPECT_LT(g.neighbor(f.cell, f.dir, f.side), 0);
}

TEST(MaskedGrid, GammaAreaScalesLikeOneOverEpsilon) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  for (int m : {1, 2, 4, 8}) {
    const MaskedGrid g = build_masked_grid(cell, m, 8);
    EXPECT_DOUBLE_EQ(g.hole_area() * g.epsilon(), cell.interface_measure());
  }
}

TEST(SurfaceCharge, ConstantXi1) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g = build_masked_grid(cell, 4, 8);
  const SurfaceCharges q = surface_charge_on_facets(
      g, [](const Point&, const Point&) { return 1.0; },
      [](const Point&, const Point&) { return 0.0; });
  for (double v : q.hole) EXPECT_DOUBLE_EQ(v, 0.25);
  EXPECT_DOUBLE_EQ(q.xi_star, 0.25);
}

TEST(SurfaceCharge, ConstantXi2) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::none(), 8);
  const MaskedGrid g = build_masked_grid(cell, 2, 8);
  const SurfaceCharges q = surface_charge_on_facets(
      g, [](const Point&, const Point&) { return 0.0; },
      [](const Point&, const Point&) { return 0.7; });
  for (double v : q.outer) EXPECT_DOUBLE_EQ(v, 0.7);
  EXPECT_NEAR(q.total(g), 0.7 * 4.0, 1e-14);
}

TEST(SurfaceCharge, PeriodicXi1MatchesSingleCellQuadrature) {
  // Single-cell quadrature oracle: Σ_Γ cos(2πy1)·h = -1.0068348730314622 at r=8.
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g = build_masked_grid(cell, 4, 8);
  const SurfaceCharges q = surface_charge_on_facets(
      g, [](const Point&, const Point& y) { return std::cos(2.0 * std::numbers::pi * y[0]); },
      [](const Point&, const Point&) { return 0.0; });
  EXPECT_NEAR(q.total(g), -1.0068348730314622, 1e-12);
}

TEST(SurfaceCharge, FacetLocalCoordinatesAreCellCoordinates) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 8);
  const MaskedGrid g = build_masked_grid(cell, 4, 8);
  for (const auto& f : g.hole_faces())
    for (int d = 0; d < 2; ++d) {
      const double frac = f.x[d] * 4.0 - std::floor(f.x[d] * 4.0);
      EXPECT_NEAR(frac, f.y[d] - std::floor(f.y[d]), 1e-12);
    }
}
