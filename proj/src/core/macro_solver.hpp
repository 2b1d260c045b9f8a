#pragma once

#include <memory>
#include <vector>

#include "cell_problem.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "simulation.hpp"

namespace porohom {

/// Right-hand side data of the effective Poisson problem on a macro grid.
struct MacroSourceSpec {
  std::vector<double> volumetric;  // s(x) = |Y^f|^{-1} ∫_Γ ξ1(x, y) dS(y), per macro cell
  std::vector<double> boundary;    // g(x) = ξ2(x) / |Y^f|, per outer face
  double porosity = 1.0;
  double interface_measure = 0.0;  // staircase |Γ|
};

/// ∫_Γ ξ1(x, ·) dS by midpoint quadrature over the staircase facets of the
/// unit cell, evaluated at every macro cell center.
MacroSourceSpec build_macro_source(const CellGeometry& cell, const SurfaceFunction& xi1,
                                   const SurfaceFunction& xi2, const MaskedGrid& macro_grid);

struct MacroSetup {
  EffectiveTensor tensor;
  std::shared_ptr<const MaskedGrid> grid;
  MacroSourceSpec source;
  MacroMode mode = MacroMode::coupled;
  double g_shift = 0.0;  // constant added to g to make the discrete data compatible
  TransportModel model;
  std::vector<std::vector<double>> initial;
};

/// Effective tensor from the config's cell at resolution r.
EffectiveTensor effective_tensor_for(const RunConfig& config);

/// Macro model on a uniform grid with `resolution` cells per axis (0: the
/// config's macro_resolution, then m·r).
MacroSetup build_macro_model(const RunConfig& config, const EffectiveTensor& tensor,
                             int resolution = 0);
MacroSetup build_macro_model(const RunConfig& config, const EffectiveTensor& tensor,
                             int resolution, MacroMode mode);

/// -∇·(A_hom∇φ0) = Σ z c + s, A_hom∇φ0·ν = g, zero mean.
CgResult solve_poisson_macro(const MacroSetup& setup, const FieldState& state,
                             std::vector<double>& phi0, double tolerance);

FieldState step_macro(const MacroSetup& setup, const FieldState& state, double dt,
                      const StepOptions& options);

RunResult run_macro(const RunConfig& config, const MacroSetup& setup,
                    const OutputObserver& observer = {});

/// Multilinear interpolation of a cell-centered field on a uniform grid,
/// constant extrapolation in the half cell next to ∂Ω.
double interpolate(const MaskedGrid& grid, const std::vector<double>& field, const Point& x);

/// Field sampled at the fluid cell centers of `target`.
std::vector<double> sample_on(const MaskedGrid& grid, const std::vector<double>& field,
                              const MaskedGrid& target);

/// ∂_k u by central differences (one-sided next to ∂Ω), [k][cell].
std::vector<std::vector<double>> cell_gradient(const MaskedGrid& grid,
                                               const std::vector<double>& u);

/// φ0(x) + ε Σ_k ∂_kφ0(x) w_k(x/ε mod 1) at the fluid cell centers of the
/// micro grid.
std::vector<double> reconstruct_corrector_potential(const MaskedGrid& macro_grid,
                                                    const std::vector<double>& phi0,
                                                    const EffectiveTensor& tensor,
                                                    const MaskedGrid& micro_grid);

}  // namespace porohom
