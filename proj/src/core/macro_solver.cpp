#include "macro_solver.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "micro_solver.hpp"

namespace porohom {

MacroSourceSpec build_macro_source(const CellGeometry& cell, const SurfaceFunction& xi1,
                                   const SurfaceFunction& xi2, const MaskedGrid& macro_grid) {
  MacroSourceSpec spec;
  spec.porosity = cell.porosity;
  spec.interface_measure = cell.interface_measure();
  const MaskedGrid unit = build_masked_grid(cell, 1, cell.resolution());
  const double area = unit.face_area();
  const auto& facets = unit.hole_faces();

  spec.volumetric.assign(macro_grid.fluid_cells(), 0.0);
  if (!facets.empty()) {
    for (std::size_t k = 0; k < spec.volumetric.size(); ++k) {
      const Point x = macro_grid.center(static_cast<int>(k));
      double sum = 0.0;
      for (const auto& f : facets) sum += xi1(x, f.y);
      spec.volumetric[k] = sum * area / cell.porosity;
    }
  }
  spec.boundary.reserve(macro_grid.outer_faces().size());
  for (const auto& f : macro_grid.outer_faces())
    spec.boundary.push_back(xi2(f.x, f.y) / cell.porosity);
  return spec;
}

EffectiveTensor effective_tensor_for(const RunConfig& config) {
  const CellGeometry cell =
      build_cell_geometry(config.geometry.inclusion, config.geometry.r, config.geometry.dimension);
  CellSolveOptions opts;
  opts.tolerance = config.solver.cell_tolerance;
  return compute_effective_tensor(cell, opts);
}

MacroSetup build_macro_model(const RunConfig& config, const EffectiveTensor& tensor,
                             int resolution) {
  return build_macro_model(config, tensor, resolution, config.macro_mode());
}

MacroSetup build_macro_model(const RunConfig& config, const EffectiveTensor& tensor,
                             int resolution, MacroMode mode) {
  const GeometryConfig& geo = config.geometry;
  if (mode == MacroMode::automatic) mode = config.macro_mode();
  if (mode == MacroMode::coupled && config.scaling.alpha != config.scaling.beta)
    throw ConfigError("coupled macro mode requires alpha == beta");
  if (mode == MacroMode::decoupled && !(config.scaling.alpha < config.scaling.beta))
    throw ConfigError("decoupled macro mode requires alpha < beta");
  if (resolution <= 0) resolution = config.solver.macro_resolution;
  if (resolution <= 0) resolution = geo.m * geo.r;

  MacroSetup setup;
  setup.tensor = tensor;
  setup.mode = mode;
  setup.grid = std::make_shared<const MaskedGrid>(build_uniform_grid(geo.dimension, resolution));
  const MaskedGrid& grid = *setup.grid;
  const CellGeometry cell = build_cell_geometry(geo.inclusion, geo.r, geo.dimension);
  if (std::abs(cell.porosity - tensor.porosity) > 1e-14)
    throw Error(ErrorKind::configuration, "effective tensor does not belong to the configured cell");

  const auto& xi1 = config.surface.xi1;
  const auto& xi2 = config.surface.xi2;
  const double shift = config.surface.xi2_shift;
  setup.source = build_macro_source(
      cell, [&](const Point& x, const Point& y) { return xi1(x, y); },
      [&](const Point& x, const Point&) { return xi2(x) + shift; }, grid);
  setup.initial = sample_initial(grid, config.species);

  TransportModel& model = setup.model;
  model.op = std::make_shared<const FvOperator>(setup.grid, tensor.a_hom);
  for (const auto& s : config.species) model.species.push_back({s.diffusivity, s.charge});
  model.eta = config.scaling.eta;
  model.p = config.scaling.p;
  model.drift_scale = mode == MacroMode::coupled ? 1.0 : 0.0;
  model.permittivity = 1.0;
  model.field_energy_scale = 1.0;
  model.fixed_charge = setup.source.volumetric;
  model.outer_charge = setup.source.boundary;

  // The limit data balance only up to O(ε) and staircase effects; a uniform
  // shift of g restores discrete solvability.
  FieldState probe;
  probe.conc = setup.initial;
  const double residual = compatibility_residual(model, probe);
  if (std::abs(residual) > 0.0) {
    setup.g_shift = -residual / grid.outer_area();
    for (double& q : model.outer_charge) q += setup.g_shift;
  }
  return setup;
}

CgResult solve_poisson_macro(const MacroSetup& setup, const FieldState& state,
                             std::vector<double>& phi0, double tolerance) {
  PoissonOptions o;
  o.tolerance = tolerance;
  return solve_potential(setup.model, state, phi0, o);
}

FieldState step_macro(const MacroSetup& setup, const FieldState& state, double dt,
                      const StepOptions& options) {
  return step(setup.model, state, dt, options);
}

RunResult run_macro(const RunConfig& config, const MacroSetup& setup,
                    const OutputObserver& observer) {
  RunControl control = run_control(config);
  control.potential_every_step =
      setup.mode == MacroMode::coupled || config.solver.poisson_every_step;
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

double interpolate(const MaskedGrid& grid, const std::vector<double>& field, const Point& x) {
  const int dim = grid.dimension();
  const int n = grid.cells_per_axis();
  const double h = grid.spacing();
  std::array<int, 3> lo{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) {
    const double s = std::clamp(x[d] / h - 0.5, 0.0, static_cast<double>(n - 1));
    lo[d] = std::min(static_cast<int>(std::floor(s)), n - 2);
    w[d] = s - lo[d];
  }
  double value = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    Index3 idx{0, 0, 0};
    double weight = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int bit = (corner >> d) & 1;
      idx[d] = lo[d] + bit;
      weight *= bit ? w[d] : 1.0 - w[d];
    }
    if (weight == 0.0) continue;
    value += weight * field[static_cast<std::size_t>(grid.compact(grid.lattice().ravel(idx)))];
  }
  return value;
}

std::vector<double> sample_on(const MaskedGrid& grid, const std::vector<double>& field,
                              const MaskedGrid& target) {
  if (grid.fluid_cells() != grid.total_cells())
    throw Error(ErrorKind::domain, "interpolation needs an unperforated source grid");
  std::vector<double> out(target.fluid_cells());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = interpolate(grid, field, target.center(static_cast<int>(k)));
  return out;
}

std::vector<std::vector<double>> cell_gradient(const MaskedGrid& grid,
                                               const std::vector<double>& u) {
  const int dim = grid.dimension();
  const double h = grid.spacing();
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(dim),
                                        std::vector<double>(grid.fluid_cells(), 0.0));
  for (std::size_t k = 0; k < grid.fluid_cells(); ++k) {
    const int c = static_cast<int>(k);
    for (int d = 0; d < dim; ++d) {
      const int lo = grid.neighbor(c, d, -1);
      const int hi = grid.neighbor(c, d, +1);
      double g = 0.0;
      if (lo >= 0 && hi >= 0) g = (u[hi] - u[lo]) / (2.0 * h);
      else if (hi >= 0) g = (u[hi] - u[k]) / h;
      else if (lo >= 0) g = (u[k] - u[lo]) / h;
      grad[d][k] = g;
    }
  }
  return grad;
}

std::vector<double> reconstruct_corrector_potential(const MaskedGrid& macro_grid,
                                                    const std::vector<double>& phi0,
                                                    const EffectiveTensor& tensor,
                                                    const MaskedGrid& micro_grid) {
  std::vector<double> out = sample_on(macro_grid, phi0, micro_grid);
  if (tensor.correctors.empty()) return out;
  const auto grad = cell_gradient(macro_grid, phi0);
  const double eps = micro_grid.epsilon();
  for (int d = 0; d < micro_grid.dimension(); ++d) {
    const auto& w = tensor.correctors[static_cast<std::size_t>(d)].values;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const int c = static_cast<int>(k);
      const double dphi = interpolate(macro_grid, grad[d], micro_grid.center(c));
      out[k] += eps * dphi * w[micro_grid.unit_cell_index(c)];
    }
  }
  return out;
}

}  // namespace porohom
