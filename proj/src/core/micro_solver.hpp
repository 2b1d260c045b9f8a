#pragma once

#include <memory>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "simulation.hpp"

namespace porohom {

/// c_i^0 sampled at fluid cell centers, [species][fluid cell].
std::vector<std::vector<double>> sample_initial(const MaskedGrid& grid,
                                                const std::vector<SpeciesConfig>& species);

/// R = Σ_i z_i Σ c_i^0 h^n + Σ_facets ξ·area.
double compatibility_residual(const MaskedGrid& grid, const std::vector<SpeciesConfig>& species,
                              const std::vector<std::vector<double>>& conc,
                              const SurfaceCharges& charges);

struct CompatibilityReport {
  double residual = 0.0;  // before balancing
  double scale = 1.0;
  double xi2_shift = 0.0;  // constant added to ξ2 by auto-balance
};

/// Accepts the data when |R| ≤ 1e-12·scale. Otherwise auto-balance shifts the
/// outer charges in place by -R/|∂Ω|, or a ConfigError carrying R is thrown.
CompatibilityReport validate_compatibility(const MaskedGrid& grid,
                                           const std::vector<SpeciesConfig>& species,
                                           const std::vector<std::vector<double>>& conc,
                                           SurfaceCharges& charges, bool auto_balance);

struct MicroSetup {
  CellGeometry cell;
  std::shared_ptr<const MaskedGrid> grid;
  SurfaceCharges charges;
  CompatibilityReport compatibility;
  TransportModel model;
  std::vector<std::vector<double>> initial;
};

/// Geometry, charges and the ε-scaled model for one ε = 1/m (m = 0 keeps the
/// config's m).
MicroSetup build_micro_model(const RunConfig& config, int m = 0);

PoissonOptions poisson_options(const RunConfig& config);
StepOptions step_options(const RunConfig& config);
RunControl run_control(const RunConfig& config);

/// ε^α K φ = h²Σ z c + h ξ on the perforated grid, zero mean.
CgResult solve_poisson_micro(const MicroSetup& setup, const FieldState& state,
                             std::vector<double>& phi, double tolerance);

FieldState step_micro(const MicroSetup& setup, const FieldState& state, double dt,
                      const StepOptions& options);

RunResult run_micro(const RunConfig& config, const MicroSetup& setup,
                    const OutputObserver& observer = {});

}  // namespace porohom
