#include "diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "macro_solver.hpp"
#include "micro_solver.hpp"

namespace porohom {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<const FvOperator> uniform_operator(int n, const Eigen::Matrix3d& tensor) {
  auto grid = std::make_shared<const MaskedGrid>(build_uniform_grid(2, n));
  return std::make_shared<const FvOperator>(grid, tensor);
}

}  // namespace

double l2_distance(const MaskedGrid& grid, const std::vector<double>& a,
                   const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum * grid.cell_volume() / grid.fluid_volume());
}

double l2_distance_modulo_mean(const MaskedGrid& grid, const std::vector<double>& a,
                               const std::vector<double>& b) {
  double shift = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) shift += a[k] - b[k];
  shift /= static_cast<double>(a.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k] - shift;
    sum += d * d;
  }
  return std::sqrt(sum * grid.cell_volume() / grid.fluid_volume());
}

double lp_bound_ratio(const DiagnosticsRecord& record, double eta, double p) {
  if (record.samples.empty()) return 0.0;
  const double v0 = record.samples.front().energy;
  double worst = 0.0;
  for (const auto& s : record.samples)
    for (double lp : s.lp_norm_p) worst = std::max(worst, eta / (p - 1.0) * lp / v0);
  return worst;
}

double relative_energy_increase(const DiagnosticsRecord& record) {
  if (record.samples.size() < 2) return 0.0;
  return record.max_energy_increase() / std::abs(record.samples.front().energy);
}

bool ConvergenceReport::concentration_errors_decrease() const {
  if (levels.size() < 2) return false;
  for (std::size_t k = 1; k < levels.size(); ++k)
    for (std::size_t i = 0; i < levels[k].conc_error.size(); ++i)
      if (!(levels[k].conc_error[i] < levels[k - 1].conc_error[i])) return false;
  return true;
}

bool ConvergenceReport::corrector_improves() const {
  if (levels.empty()) return false;
  return levels.back().phi_corrected_error <= levels.back().phi_error;
}

bool ConvergenceReport::energy_bound_holds() const {
  double v0 = -std::numeric_limits<double>::infinity();
  for (const auto& l : levels) v0 = std::max(v0, l.initial_energy);
  for (const auto& l : levels)
    if (l.max_energy > 2.0 * v0) return false;
  return true;
}

double ConvergenceReport::max_bound_variation() const {
  double worst = 0.0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double a = levels[k - 1].max_concentration;
    const double b = levels[k].max_concentration;
    worst = std::max(worst, std::abs(b - a) / std::max(std::abs(a), 1e-300));
  }
  return worst;
}

ConvergenceReport run_convergence_study(const RunConfig& base, const std::vector<int>& m_list,
                                        int macro_resolution, MacroMode mode) {
  if (m_list.empty()) throw ConfigError("convergence study needs a non-empty m list");
  for (std::size_t k = 1; k < m_list.size(); ++k)
    if (m_list[k] <= m_list[k - 1])
      throw ConfigError("convergence study needs strictly decreasing epsilon");
  if (mode == MacroMode::automatic) mode = base.macro_mode();
  if (macro_resolution <= 0) macro_resolution = m_list.back() * base.geometry.r;

  ConvergenceReport report;
  report.mode = mode;
  report.macro_resolution = macro_resolution;
  report.dimension = base.geometry.dimension;
  report.physics_hash = physics_hash(base);

  std::vector<RunConfig> configs;
  for (int m : m_list) {
    RunConfig cfg = base;
    cfg.geometry.m = m;
    if (physics_hash(cfg) != report.physics_hash)
      throw Error(ErrorKind::harness, "runs of the study do not share their physical data");
    configs.push_back(std::move(cfg));
  }

  const EffectiveTensor tensor = effective_tensor_for(base);
  report.porosity = tensor.porosity;
  report.a_hom = tensor.a_hom;

  struct MacroRun {
    MacroSetup setup;
    RunResult result;
    double runtime;
  };
  auto macro_future = std::async(std::launch::async, [&]() {
    const auto start = Clock::now();
    MacroRun run{build_macro_model(base, tensor, macro_resolution, mode), {}, 0.0};
    run.result = run_macro(base, run.setup);
    run.runtime = seconds_since(start);
    return run;
  });

  struct MicroRun {
    MicroSetup setup;
    RunResult result;
    double runtime;
  };
  std::vector<std::future<MicroRun>> micro_futures;
  for (const RunConfig& cfg : configs) {
    micro_futures.push_back(std::async(std::launch::async, [&cfg]() {
      const auto start = Clock::now();
      MicroRun run{build_micro_model(cfg), {}, 0.0};
      run.result = run_micro(cfg, run.setup);
      run.runtime = seconds_since(start);
      return run;
    }));
  }

  MacroRun macro = macro_future.get();
  report.macro_runtime = macro.runtime;
  if (macro.result.failed)
    throw Error(ErrorKind::harness, "macro run failed: " + macro.result.failure);
  const MaskedGrid& macro_grid = *macro.setup.grid;
  const FieldState& limit = macro.result.final_state;

  for (std::size_t k = 0; k < configs.size(); ++k) {
    MicroRun micro = micro_futures[k].get();
    if (micro.result.failed)
      throw Error(ErrorKind::harness, "micro run for m=" + std::to_string(m_list[k]) +
                                          " failed: " + micro.result.failure);
    const MaskedGrid& grid = *micro.setup.grid;
    const FieldState& state = micro.result.final_state;
    const auto& diag = micro.result.diagnostics;

    ConvergenceLevel level;
    level.m = m_list[k];
    level.epsilon = grid.epsilon();
    level.steps = micro.result.steps;
    level.runtime = micro.runtime;
    level.initial_energy = diag.samples.front().energy;
    level.max_energy = level.initial_energy;
    for (const auto& s : diag.samples) level.max_energy = std::max(level.max_energy, s.energy);
    level.max_concentration = diag.max_concentration();
    level.mass_drift = diag.max_relative_mass_drift();
    for (std::size_t i = 0; i < state.conc.size(); ++i)
      level.conc_error.push_back(
          l2_distance(grid, state.conc[i], sample_on(macro_grid, limit.conc[i], grid)));

    std::vector<double> scaled = state.phi;
    const double factor = micro.setup.model.permittivity;
    for (double& v : scaled) v *= factor;
    level.phi_error = l2_distance_modulo_mean(grid, scaled, sample_on(macro_grid, limit.phi, grid));
    level.phi_corrected_error = l2_distance_modulo_mean(
        grid, scaled, reconstruct_corrector_potential(macro_grid, limit.phi, tensor, grid));
    report.levels.push_back(std::move(level));
  }
  return report;
}

const char* to_string(MmsKind kind) {
  switch (kind) {
    case MmsKind::poisson_micro: return "poisson_micro";
    case MmsKind::poisson_macro: return "poisson_macro";
    case MmsKind::diffusion_space: return "diffusion_space";
    case MmsKind::diffusion_time: return "diffusion_time";
    case MmsKind::constant: return "constant";
  }
  return "unknown";
}

double observed_order(const std::vector<double>& h, const std::vector<double>& e) {
  const std::size_t n = h.size();
  if (n < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(h[k]);
    const double y = std::log(e[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

constexpr double pi = std::numbers::pi;

// Poisson with A = tensor, φ = cos(πx1)cos(kπx2): data from the exact
// solution, including the Neumann flux A∇φ·ν on ∂Ω.
double poisson_error(int n, const Eigen::Matrix3d& a, double k2) {
  TransportModel model;
  model.op = uniform_operator(n, a);
  const MaskedGrid& g = model.grid();
  auto phi_exact = [&](const Point& x) { return std::cos(pi * x[0]) * std::cos(k2 * pi * x[1]); };
  auto grad = [&](const Point& x) {
    return Eigen::Vector3d(-pi * std::sin(pi * x[0]) * std::cos(k2 * pi * x[1]),
                           -k2 * pi * std::cos(pi * x[0]) * std::sin(k2 * pi * x[1]), 0.0);
  };
  model.fixed_charge.resize(g.fluid_cells());
  std::vector<double> exact(g.fluid_cells());
  for (std::size_t c = 0; c < exact.size(); ++c) {
    const Point x = g.center(static_cast<int>(c));
    exact[c] = phi_exact(x);
    const double mixed = k2 * pi * pi * std::sin(pi * x[0]) * std::sin(k2 * pi * x[1]);
    model.fixed_charge[c] =
        (a(0, 0) * pi * pi + a(1, 1) * k2 * k2 * pi * pi) * exact[c] - 2.0 * a(0, 1) * mixed;
  }
  for (const auto& f : g.outer_faces()) {
    const Eigen::Vector3d flux = a * grad(f.x);
    model.outer_charge.push_back(f.side * flux[f.dir]);
  }
  FieldState state;
  std::vector<double> phi(g.fluid_cells(), 0.0);
  PoissonOptions o;
  o.tolerance = 1e-12;
  o.max_iterations = 100000;
  o.project_rhs = true;
  solve_potential(model, state, phi, o);
  return l2_distance_modulo_mean(g, phi, exact);
}

// ∂t c = ∇·∇h_p(c) + f with c = e^{-t}(2 + cos πx1), η = 1, p = 4.
TransportModel diffusion_model(int n) {
  TransportModel model;
  model.op = uniform_operator(n, Eigen::Matrix3d::Identity());
  model.species.push_back({1.0, 0});
  model.eta = 1.0;
  model.p = 4.0;
  return model;
}

double diffusion_exact(double t, const Point& x) {
  return std::exp(-t) * (2.0 + std::cos(pi * x[0]));
}

double diffusion_source(double t, const Point& x) {
  const double c = diffusion_exact(t, x);
  const double cx = -pi * std::exp(-t) * std::sin(pi * x[0]);
  const double cxx = -pi * pi * std::exp(-t) * std::cos(pi * x[0]);
  const double hp1 = 1.0 + 4.0 * c * c * c;
  const double hp2 = 12.0 * c * c;
  return -c - (hp2 * cx * cx + hp1 * cxx);
}

FieldState diffusion_run(int n, double final_time, double dt) {
  TransportModel model = diffusion_model(n);
  FieldState state;
  state.conc.emplace_back(model.grid().fluid_cells());
  for (std::size_t c = 0; c < state.conc[0].size(); ++c)
    state.conc[0][c] = diffusion_exact(0.0, model.grid().center(static_cast<int>(c)));
  state.phi.assign(model.grid().fluid_cells(), 0.0);
  RunControl control;
  control.final_time = final_time;
  control.dt_max = dt;
  control.output_interval = final_time;
  control.step.solve_potential = false;
  control.step.linear_tolerance = 1e-13;
  control.step.max_iterations = 100000;
  control.step.source = [](std::size_t, double t, const Point& x) { return diffusion_source(t, x); };
  control.potential_every_step = true;
  RunResult r = run_trajectory(model, std::move(state), control);
  if (r.failed) throw Error(ErrorKind::verification, "manufactured diffusion run failed: " + r.failure);
  return r.final_state;
}

}  // namespace

MmsResult run_mms_verification(MmsKind kind, const std::vector<int>& resolutions) {
  MmsResult result;
  result.kind = kind;
  result.max_order = std::numeric_limits<double>::infinity();
  switch (kind) {
    case MmsKind::poisson_micro:
    case MmsKind::poisson_macro: {
      Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
      double k2 = 1.0;
      if (kind == MmsKind::poisson_macro) {
        a(0, 0) = 1.0;
        a(0, 1) = a(1, 0) = 0.3;
        a(1, 1) = 0.8;
        k2 = 2.0;
      }
      for (int n : resolutions) {
        result.h.push_back(1.0 / n);
        result.errors.push_back(poisson_error(n, a, k2));
      }
      result.min_order = 1.8;
      result.max_order = 2.2;
      break;
    }
    case MmsKind::diffusion_space: {
      const double final_time = 0.05;
      for (int n : resolutions) {
        const double h = 1.0 / n;
        const FieldState s = diffusion_run(n, final_time, h * h);
        TransportModel model = diffusion_model(n);
        std::vector<double> exact(s.conc[0].size());
        for (std::size_t c = 0; c < exact.size(); ++c)
          exact[c] = diffusion_exact(s.t, model.grid().center(static_cast<int>(c)));
        result.h.push_back(h);
        result.errors.push_back(l2_distance(model.grid(), s.conc[0], exact));
      }
      result.min_order = 1.8;
      break;
    }
    case MmsKind::diffusion_time: {
      // Successive differences on a fixed grid isolate the temporal error.
      const int n = resolutions.empty() ? 32 : resolutions.front();
      const double final_time = 0.1;
      TransportModel model = diffusion_model(n);
      std::vector<FieldState> runs;
      for (int steps : {10, 20, 40, 80, 160})
        runs.push_back(diffusion_run(n, final_time, final_time / steps));
      for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        result.h.push_back(final_time / (10 << k));
        result.errors.push_back(l2_distance(model.grid(), runs[k].conc[0], runs[k + 1].conc[0]));
      }
      result.min_order = 0.9;
      break;
    }
    case MmsKind::constant: {
      for (int n : resolutions) {
        TransportModel model;
        model.op = uniform_operator(n, Eigen::Matrix3d::Identity());
        model.species = {{1.0, 1}, {1.0, -1}};
        FieldState state;
        state.conc.assign(2, std::vector<double>(model.grid().fluid_cells(), 2.0));
        state.phi.assign(model.grid().fluid_cells(), 0.0);
        RunControl control;
        control.final_time = 0.01;
        control.dt_max = 1e-3;
        control.output_interval = 0.01;
        RunResult r = run_trajectory(model, std::move(state), control);
        if (r.failed) throw Error(ErrorKind::verification, "constant run failed: " + r.failure);
        double err = 0.0;
        for (const auto& c : r.final_state.conc)
          for (double v : c) err = std::max(err, std::abs(v - 2.0));
        for (double v : r.final_state.phi) err = std::max(err, std::abs(v));
        result.h.push_back(1.0 / n);
        result.errors.push_back(err);
      }
      for (double e : result.errors) result.max_error = std::max(result.max_error, e);
      result.passed = result.max_error <= 1e-13;
      return result;
    }
  }
  for (double e : result.errors) result.max_error = std::max(result.max_error, e);
  result.order = observed_order(result.h, result.errors);
  result.passed = result.order >= result.min_order && result.order <= result.max_order;
  return result;
}

bool MmsReport::passed() const {
  if (results.empty()) return false;
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

MmsReport run_mms_suite(const std::vector<int>& resolutions) {
  MmsReport report;
  for (MmsKind kind : {MmsKind::poisson_micro, MmsKind::poisson_macro, MmsKind::diffusion_space,
                       MmsKind::diffusion_time, MmsKind::constant})
    report.results.push_back(run_mms_verification(kind, resolutions));
  return report;
}

EtaSweepReport run_eta_sweep(const RunConfig& macro_config, const std::vector<double>& eta_list) {
  if (macro_config.macro_mode() != MacroMode::coupled)
    throw ConfigError("eta sweep needs the coupled macro mode (alpha == beta)");
  for (double eta : eta_list)
    if (!(eta > 0.0)) throw ConfigError("eta sweep values must be > 0");
  for (std::size_t k = 1; k < eta_list.size(); ++k)
    if (eta_list[k] > eta_list[k - 1]) throw ConfigError("eta sweep list must be non-increasing");

  EtaSweepReport report;
  const EffectiveTensor tensor = effective_tensor_for(macro_config);
  for (double eta : eta_list) {
    RunConfig cfg = macro_config;
    cfg.scaling.eta = eta;
    const MacroSetup setup = build_macro_model(cfg, tensor);
    report.macro_resolution = setup.grid->cells_per_axis();
    RunResult r = run_macro(cfg, setup);
    EtaSweepEntry entry;
    entry.eta = eta;
    entry.failed = r.failed;
    entry.failure = r.failure;
    if (!r.diagnostics.samples.empty()) entry.final_energy = r.diagnostics.samples.back().energy;
    entry.final_state = std::move(r.final_state);
    report.entries.push_back(std::move(entry));
  }
  if (!report.entries.empty()) {
    const MaskedGrid grid = build_uniform_grid(macro_config.geometry.dimension,
                                               report.macro_resolution);
    for (std::size_t k = 1; k < report.entries.size(); ++k) {
      const auto& a = report.entries[k - 1].final_state;
      const auto& b = report.entries[k].final_state;
      if (report.entries[k - 1].failed || report.entries[k].failed) {
        report.distances.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < a.conc.size(); ++i) {
        const double d = l2_distance(grid, a.conc[i], b.conc[i]);
        sum += d * d;
      }
      report.distances.push_back(std::sqrt(sum));
    }
  }
  report.distances_monotone = true;
  for (std::size_t k = 1; k < report.distances.size(); ++k)
    if (!(report.distances[k] <= report.distances[k - 1])) report.distances_monotone = false;
  return report;
}

}  // namespace porohom
