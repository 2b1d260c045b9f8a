#include <gtest/gtest.h>

#include <cmath>

#include "cell_problem.hpp"
#include "error.hpp"

using namespace porohom;

TEST(CellProblem, NoInclusionGivesIdentity) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::none(), 16);
  const EffectiveTensor t = compute_effective_tensor(cell);
  EXPECT_NEAR((t.matrix() - Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-12);
  for (const auto& w : t.correctors)
    for (double v : w.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(CellProblem, DiskMatchesIndependentSolve) {
  // Oracle: pinned-node sparse direct solve of the same staircase problem.
  const EffectiveTensor t64 = compute_effective_tensor(
      build_cell_geometry(InclusionShape::disk(0.25), 64), {.tolerance = 1e-12});
  const EffectiveTensor t128 = compute_effective_tensor(
      build_cell_geometry(InclusionShape::disk(0.25), 128), {.tolerance = 1e-12});
  EXPECT_NEAR(t64.a_hom(0, 0), 0.82383400154094, 1e-8);
  EXPECT_NEAR(t64.a_hom(1, 1), 0.82383400154094, 1e-8);
  EXPECT_NEAR(t128.a_hom(0, 0), 0.82965107287450, 1e-8);
  EXPECT_NEAR(t128.a_hom(1, 1), 0.82965107287450, 1e-8);
  EXPECT_LT(std::abs(t64.a_hom(0, 0) - t128.a_hom(0, 0)), 1e-2);
}

TEST(CellProblem, TensorProperties) {
  const EffectiveTensor t =
      compute_effective_tensor(build_cell_geometry(InclusionShape::disk(0.25, {0.45, 0.52}), 32));
  EXPECT_LE(t.asymmetry(), 1e-10);
  EXPECT_GT(t.min_eigenvalue(), 0.0);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(t.a_hom(k, k), 0.0);
    EXPECT_LT(t.a_hom(k, k), 1.0 - 1e-4);
  }
  EXPECT_LE((t.a_hom - t.energy_form).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(CellProblem, SwapSymmetryOfDisk) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 32);
  const EffectiveTensor t = compute_effective_tensor(cell, {.tolerance = 1e-12});
  const auto& w1 = t.correctors[0].values;
  const auto& w2 = t.correctors[1].values;
  for (std::size_t c = 0; c < cell.lattice.size(); ++c) {
    Index3 idx = cell.lattice.unravel(c);
    std::swap(idx[0], idx[1]);
    EXPECT_NEAR(w2[c], w1[cell.lattice.ravel(idx)], 1e-9);
  }
}

TEST(CellProblem, SquareIsIsotropic) {
  const EffectiveTensor t =
      compute_effective_tensor(build_cell_geometry(InclusionShape::square(0.25), 64));
  EXPECT_NEAR(t.a_hom(0, 0), t.a_hom(1, 1), 1e-10);
  EXPECT_NEAR(t.a_hom(0, 0), 0.768018608050407, 1e-8);
  EXPECT_NEAR(t.a_hom(0, 1), 0.0, 1e-10);
}

TEST(CellProblem, ResidualReflectsConvergence) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.25), 32);
  const CorrectorField good = solve_cell_problem(cell, 0, {.tolerance = 1e-12});
  EXPECT_TRUE(good.converged);
  EXPECT_LE(corrector_residual(cell, good), 1e-8);

  const CorrectorField bad =
      solve_cell_problem(cell, 0, {.tolerance = 1e-12, .max_iterations = 2, .throw_on_failure = false});
  EXPECT_FALSE(bad.converged);
  EXPECT_GT(corrector_residual(cell, bad), 1e-4);
  EXPECT_THROW(solve_cell_problem(cell, 0, {.tolerance = 1e-12, .max_iterations = 2}), SolverError);
}

TEST(CellProblem, CorrectorHasZeroMean) {
  const CellGeometry cell = build_cell_geometry(InclusionShape::disk(0.3), 24);
  const CorrectorField w = solve_cell_problem(cell, 1);
  double s = 0.0;
  for (std::size_t c = 0; c < cell.lattice.size(); ++c) {
    if (cell.is_fluid(c)) {
      s += w.values[c];
    } else {
      EXPECT_EQ(w.values[c], 0.0);
    }
  }
  EXPECT_NEAR(s / cell.fluid_count, 0.0, 1e-12);
}

TEST(CellProblem, ThreeDimensional) {
  const EffectiveTensor t =
      compute_effective_tensor(build_cell_geometry(InclusionShape::disk(0.25), 12, 3));
  EXPECT_EQ(t.matrix().rows(), 3);
  EXPECT_NEAR(t.a_hom(0, 0), t.a_hom(2, 2), 1e-9);
  EXPECT_LT(t.a_hom(0, 0), 1.0);
  EXPECT_GT(t.min_eigenvalue(), 0.0);
}
