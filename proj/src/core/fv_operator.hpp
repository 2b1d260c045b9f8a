#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace porohom {

/// Two-point flux finite volumes on the fluid cells of a MaskedGrid with a
/// constant symmetric tensor A. Normal terms use the face difference; cross
/// terms A_de are assembled on cell corners from the four surrounding cells,
/// which in the interior reproduces the averaged tangential difference stencil
/// and keeps the operator symmetric. Corners touching ∂Ω carry no cross term
/// (even reflection across ∂Ω).
///
/// All operators are scaled by h^{2-n}: K x = Σ_faces A_dd (x_P - x_Q) + cross.
class FvOperator {
 public:
  struct Corner {
    int p, pd, pe, pde;  // P, P+e_d, P+e_e, P+e_d+e_e (compact indices)
    int d, e;
  };

  FvOperator(std::shared_ptr<const MaskedGrid> grid, const Eigen::Matrix3d& tensor);

  const MaskedGrid& grid() const { return *grid_; }
  std::shared_ptr<const MaskedGrid> grid_ptr() const { return grid_; }
  const Eigen::Matrix3d& tensor() const { return tensor_; }
  bool has_cross_terms() const { return !corners_.empty(); }
  const std::vector<Corner>& corners() const { return corners_; }
  std::size_t size() const { return grid_->fluid_cells(); }

  /// y = K x with unit coefficient.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = shift·x + K_w x where face f is weighted by face_weight[f] and corner
  /// c by corner_weight[c] (may be empty when there are no corners).
  void apply_weighted(std::span<const double> face_weight,
                      std::span<const double> corner_weight, double shift,
                      std::span<const double> x, std::span<double> y) const;
  /// Diagonal of shift·I + K_w.
  std::vector<double> diagonal(std::span<const double> face_weight,
                               std::span<const double> corner_weight, double shift) const;

  /// (A∇u)·e_d on every interior face; tangential parts use central
  /// differences averaged over the two cells, clamped at ∂Ω and at holes.
  void normal_gradient(std::span<const double> u, std::span<double> out) const;

  /// Σ ∇u·A∇u h^n (discrete Dirichlet energy, twice the energy form).
  double dirichlet_energy(std::span<const double> u) const;

 private:
  std::shared_ptr<const MaskedGrid> grid_;
  Eigen::Matrix3d tensor_;
  std::vector<Corner> corners_;
};

}  // namespace porohom
