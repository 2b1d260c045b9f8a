#pragma once

#include <Eigen/Dense>
#include <vector>

#include "geometry.hpp"

namespace porohom {

/// Periodic corrector w_k on the fluid cells of the unit cell, normalized to
/// zero mean. `values` is indexed by lattice cell; solid cells hold 0.
struct CorrectorField {
  int direction = 0;  // 0-based k
  std::vector<double> values;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CellSolveOptions {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: 50 * sqrt(#unknowns)
  bool throw_on_failure = true;
};

CorrectorField solve_cell_problem(const CellGeometry& cell, int direction,
                                  const CellSolveOptions& options = {});

/// Max over fluid cells of |net outflow of (∇w_k + e_k)| per unit face area,
/// i.e. the discrete divergence scaled by the cell spacing.
double corrector_residual(const CellGeometry& cell, const CorrectorField& field);

struct EffectiveTensor {
  int dimension = 2;
  double porosity = 1.0;
  Eigen::Matrix3d a_hom = Eigen::Matrix3d::Zero();        // mean-flux formula
  Eigen::Matrix3d energy_form = Eigen::Matrix3d::Zero();  // (∇w_j+e_j)·(∇w_k+e_k)
  std::vector<CorrectorField> correctors;

  Eigen::MatrixXd matrix() const { return a_hom.topLeftCorner(dimension, dimension); }
  double min_eigenvalue() const;
  double asymmetry() const;
};

/// Solves the n cell problems (concurrently) and assembles A_hom.
EffectiveTensor compute_effective_tensor(const CellGeometry& cell,
                                         const CellSolveOptions& options = {});

EffectiveTensor identity_tensor(int dimension);

}  // namespace porohom
