#include "micro_solver.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace porohom {

std::vector<std::vector<double>> sample_initial(const MaskedGrid& grid,
                                                const std::vector<SpeciesConfig>& species) {
  std::vector<std::vector<double>> conc;
  for (const auto& s : species) {
    std::vector<double> c(grid.fluid_cells());
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = s.initial(grid.center(static_cast<int>(k)));
      if (!(c[k] >= 0.0))
        throw ConfigError("initial concentration \"" + s.initial.text() +
                          "\" is negative or undefined at a cell center (initial concentrations must be nonnegative)");
    }
    conc.push_back(std::move(c));
  }
  return conc;
}

double compatibility_residual(const MaskedGrid& grid, const std::vector<SpeciesConfig>& species,
                              const std::vector<std::vector<double>>& conc,
                              const SurfaceCharges& charges) {
  double bulk = 0.0;
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i].charge == 0) continue;
    double mass = 0.0;
    for (double c : conc[i]) mass += c;
    bulk += species[i].charge * mass;
  }
  return bulk * grid.cell_volume() + charges.total(grid);
}

CompatibilityReport validate_compatibility(const MaskedGrid& grid,
                                           const std::vector<SpeciesConfig>& species,
                                           const std::vector<std::vector<double>>& conc,
                                           SurfaceCharges& charges, bool auto_balance) {
  CompatibilityReport report;
  report.residual = compatibility_residual(grid, species, conc, charges);
  double scale = 0.0;
  for (std::size_t i = 0; i < species.size(); ++i) {
    double mass = 0.0;
    for (double c : conc[i]) mass += c;
    scale += std::abs(species[i].charge) * mass * grid.cell_volume();
  }
  for (double q : charges.hole) scale += std::abs(q) * grid.face_area();
  for (double q : charges.outer) scale += std::abs(q) * grid.face_area();
  report.scale = std::max(scale, 1.0);

  if (std::abs(report.residual) <= 1e-12 * report.scale) return report;
  if (!auto_balance)
    throw ConfigError("charge compatibility violated: residual " +
                          std::to_string(report.residual) +
                          "; enable auto_balance or adjust xi1/xi2",
                      report.residual);
  report.xi2_shift = -report.residual / grid.outer_area();
  for (double& q : charges.outer) q += report.xi2_shift;
  return report;
}

PoissonOptions poisson_options(const RunConfig& config) {
  PoissonOptions o;
  o.tolerance = config.solver.poisson_tolerance;
  o.max_iterations = config.solver.max_iterations;
  return o;
}

StepOptions step_options(const RunConfig& config) {
  StepOptions o;
  o.explicit_time = config.solver.explicit_time;
  o.linear_tolerance = config.solver.linear_tolerance;
  o.max_iterations = config.solver.max_iterations;
  o.poisson = poisson_options(config);
  return o;
}

RunControl run_control(const RunConfig& config) {
  RunControl c;
  c.final_time = config.scaling.final_time;
  c.dt_max = config.scaling.dt;
  c.output_interval = config.scaling.output_interval;
  c.cfl_safety = config.scaling.cfl_safety;
  c.dt_min = config.scaling.dt_min;
  c.step = step_options(config);
  return c;
}

MicroSetup build_micro_model(const RunConfig& config, int m) {
  const GeometryConfig& geo = config.geometry;
  if (m <= 0) m = geo.m;
  MicroSetup setup;
  setup.cell = build_cell_geometry(geo.inclusion, geo.r, geo.dimension);
  setup.grid = std::make_shared<const MaskedGrid>(build_masked_grid(setup.cell, m, geo.r));
  const MaskedGrid& grid = *setup.grid;

  const auto& xi1 = config.surface.xi1;
  const auto& xi2 = config.surface.xi2;
  setup.charges = surface_charge_on_facets(
      grid, [&](const Point& x, const Point& y) { return xi1(x, y); },
      [&](const Point& x, const Point&) { return xi2(x); });
  for (double& q : setup.charges.outer) q += config.surface.xi2_shift;
  setup.initial = sample_initial(grid, config.species);
  setup.compatibility = validate_compatibility(grid, config.species, setup.initial,
                                               setup.charges, config.surface.auto_balance);
  setup.compatibility.xi2_shift += config.surface.xi2_shift;

  const double eps = grid.epsilon();
  TransportModel& model = setup.model;
  model.op = std::make_shared<const FvOperator>(setup.grid, Eigen::Matrix3d::Identity());
  for (const auto& s : config.species) model.species.push_back({s.diffusivity, s.charge});
  model.eta = config.scaling.eta;
  model.p = config.scaling.p;
  model.drift_scale = std::pow(eps, config.scaling.beta);
  model.permittivity = std::pow(eps, config.scaling.alpha);
  model.field_energy_scale = std::pow(eps, config.scaling.alpha + config.scaling.beta);
  model.hole_charge = setup.charges.hole;
  model.outer_charge = setup.charges.outer;
  return setup;
}

CgResult solve_poisson_micro(const MicroSetup& setup, const FieldState& state,
                             std::vector<double>& phi, double tolerance) {
  PoissonOptions o;
  o.tolerance = tolerance;
  return solve_potential(setup.model, state, phi, o);
}

FieldState step_micro(const MicroSetup& setup, const FieldState& state, double dt,
                      const StepOptions& options) {
  return step(setup.model, state, dt, options);
}

RunResult run_micro(const RunConfig& config, const MicroSetup& setup,
                    const OutputObserver& observer) {
  RunControl control = run_control(config);
  control.potential_every_step = true;
  FieldState initial;
  try {
    initial = make_initial_state(setup.model, setup.initial, control.step.poisson);
  } catch (const std::exception& e) {
    RunResult failed;
    failed.failed = true;
    failed.failure = e.what();
    return failed;
  }
  return run_trajectory(setup.model, std::move(initial), control, observer);
}

}  // namespace porohom
