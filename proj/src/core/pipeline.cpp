#include "pipeline.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>

#include "cell_problem.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "macro_solver.hpp"
#include "micro_solver.hpp"
#include "output.hpp"

#ifndef POROHOM_VERSION
#define POROHOM_VERSION "0.0.0"
#endif

namespace porohom {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

class Checks {
 public:
  void add(const std::string& name, double value, double limit, bool passed) {
    list_.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"passed", passed}});
    if (!passed) failed_.push_back(name);
  }
  void require(const std::string& name, bool passed) {
    list_.push_back({{"name", name}, {"passed", passed}});
    if (!passed) failed_.push_back(name);
  }
  const json& to_json() const { return list_; }
  const std::vector<std::string>& failed() const { return failed_; }

 private:
  json list_ = json::array();
  std::vector<std::string> failed_;
};

struct Context {
  const RunConfig& config;
  RunDirectory& dir;
  Checks checks;
  json timing = json::object();
};

json matrix_json(const Eigen::Matrix3d& a, int dim) {
  json rows = json::array();
  for (int i = 0; i < dim; ++i) {
    json row = json::array();
    for (int j = 0; j < dim; ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json run_summary(const RunResult& r, double eta, double p) {
  const auto& d = r.diagnostics;
  double mean_phi = 0.0;
  for (const auto& s : d.samples) mean_phi = std::max(mean_phi, std::abs(s.mean_phi));
  json j;
  j["samples"] = d.samples.size();
  j["steps"] = r.steps;
  j["rejected_steps"] = r.rejected_steps;
  j["failed"] = r.failed;
  j["failure"] = r.failure;
  j["final_time"] = r.final_state.t;
  if (d.samples.empty()) return j;
  double initial_max = 0.0;
  for (double v : d.samples.front().max_conc) initial_max = std::max(initial_max, v);
  j["max_relative_mass_drift"] = d.max_relative_mass_drift();
  j["max_abs_compatibility"] = d.max_abs_compatibility();
  j["min_concentration"] = d.min_concentration();
  j["max_concentration"] = d.max_concentration();
  j["initial_max_concentration"] = initial_max;
  j["initial_energy"] = d.samples.front().energy;
  j["final_energy"] = d.samples.back().energy;
  j["max_relative_energy_increase"] = relative_energy_increase(d);
  j["lp_bound_ratio"] = lp_bound_ratio(d, eta, p);
  j["max_abs_mean_potential"] = mean_phi;
  return j;
}

// Writes snapshots at the scheduled output indices and always the last state.
class SnapshotWriter {
 public:
  SnapshotWriter(RunDirectory& dir, const MaskedGrid& grid, int every, std::string conc,
                 std::string phi)
      : dir_(dir), grid_(grid), every_(every), conc_(std::move(conc)), phi_(std::move(phi)) {}

  OutputObserver observer() {
    return [this](const FieldState& state, const DiagnosticsSample&) {
      if (index_ == 0 || (every_ > 0 && index_ % every_ == 0)) write(state);
      ++index_;
    };
  }
  void finish(const FieldState& state) {
    if (state.conc.empty()) return;
    if (!dir_.contains(snapshot_name(state.t))) write(state);
  }

 private:
  void write(const FieldState& state) {
    dir_.write(snapshot_name(state.t), snapshot_csv(grid_, state, conc_, phi_));
  }
  RunDirectory& dir_;
  const MaskedGrid& grid_;
  int every_;
  std::string conc_, phi_;
  int index_ = 0;
};

json cell_pipeline(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto start = Clock::now();
  const CellGeometry cell =
      build_cell_geometry(cfg.geometry.inclusion, cfg.geometry.r, cfg.geometry.dimension);
  CellSolveOptions opts;
  opts.tolerance = cfg.solver.cell_tolerance;
  const EffectiveTensor t = compute_effective_tensor(cell, opts);
  ctx.timing["cell_seconds"] = seconds_since(start);
  const int dim = t.dimension;

  json report;
  report["resolution"] = cell.resolution();
  report["dimension"] = dim;
  report["inclusion"] = to_string(cell.shape.kind);
  report["porosity"] = t.porosity;
  report["interface_measure"] = cell.interface_measure();
  report["A_hom"] = matrix_json(t.a_hom, dim);
  report["energy_form"] = matrix_json(t.energy_form, dim);
  report["min_eigenvalue"] = t.min_eigenvalue();
  report["asymmetry"] = t.asymmetry();
  json residuals = json::array();
  double worst_residual = 0.0;
  for (const auto& w : t.correctors) {
    const double res = corrector_residual(cell, w);
    worst_residual = std::max(worst_residual, res);
    residuals.push_back({{"direction", w.direction + 1},
                         {"iterations", w.iterations},
                         {"relative_residual", w.relative_residual},
                         {"divergence_residual", res}});
  }
  report["residuals"] = residuals;

  double diag_lo = 1.0, diag_hi = 0.0, mismatch = 0.0;
  for (int k = 0; k < dim; ++k) {
    diag_lo = std::min(diag_lo, t.a_hom(k, k));
    diag_hi = std::max(diag_hi, t.a_hom(k, k));
    for (int j = 0; j < dim; ++j)
      mismatch = std::max(mismatch, std::abs(t.a_hom(k, j) - t.energy_form(k, j)) /
                                        std::max(std::abs(t.a_hom(k, k)), 1e-300));
  }
  ctx.checks.add("symmetry", t.asymmetry(), 1e-10, t.asymmetry() <= 1e-10);
  ctx.checks.add("positive_definite", t.min_eigenvalue(), 0.0, t.min_eigenvalue() > 0.0);
  ctx.checks.add("diagonal_upper_bound", diag_hi, 1.0 + 1e-10, diag_hi <= 1.0 + 1e-10);
  ctx.checks.add("diagonal_positive", diag_lo, 0.0, diag_lo > 0.0);
  ctx.checks.add("energy_form_agreement", mismatch, 1e-8, mismatch <= 1e-8);
  ctx.checks.add("corrector_residual", worst_residual, 1e-8, worst_residual <= 1e-8);

  if (cfg.output.write_correctors) {
    for (const auto& w : t.correctors) {
      std::string csv = "cell_index";
      for (int d = 1; d <= dim; ++d) csv += ",y" + std::to_string(d);
      csv += ",w\n";
      for (std::size_t c = 0; c < cell.lattice.size(); ++c) {
        if (!cell.is_fluid(c)) continue;
        const Index3 idx = cell.lattice.unravel(c);
        std::string line = std::to_string(c);
        for (int d = 0; d < dim; ++d) line += "," + format_number((idx[d] + 0.5) * cell.spacing());
        line += "," + format_number(w.values[c]) + "\n";
        csv += line;
      }
      ctx.dir.write("corrector_" + std::to_string(w.direction + 1) + ".csv", csv);
    }
  }
  return report;
}

json micro_pipeline(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto start = Clock::now();
  const MicroSetup setup = build_micro_model(cfg);
  const MaskedGrid& grid = *setup.grid;
  SnapshotWriter snapshots(ctx.dir, grid, cfg.output.snapshot_every, "c", "phi");
  const RunResult r = run_micro(cfg, setup, snapshots.observer());
  snapshots.finish(r.final_state);
  ctx.dir.write("diagnostics.csv", diagnostics_csv(r.diagnostics, "c", "phi"));
  ctx.timing["micro_seconds"] = seconds_since(start);

  json report;
  report["epsilon"] = grid.epsilon();
  report["m"] = grid.m();
  report["r"] = grid.r();
  report["grid"] = {{"cells", grid.total_cells()},
                    {"fluid_cells", grid.fluid_cells()},
                    {"hole_faces", grid.hole_faces().size()},
                    {"outer_faces", grid.outer_faces().size()},
                    {"spacing", grid.spacing()},
                    {"fluid_volume", grid.fluid_volume()}};
  report["porosity"] = setup.cell.porosity;
  report["compatibility"] = {{"residual", setup.compatibility.residual},
                             {"scale", setup.compatibility.scale},
                             {"xi2_shift", setup.compatibility.xi2_shift}};
  report["xi_star"] = setup.charges.xi_star;
  const json summary = run_summary(r, cfg.scaling.eta, cfg.scaling.p);
  report["summary"] = summary;

  ctx.checks.require("run_completed", !r.failed);
  if (!r.diagnostics.samples.empty()) {
    const auto& d = r.diagnostics;
    const double drift = d.max_relative_mass_drift();
    ctx.checks.add("mass_conservation", drift, 1e-9, drift <= 1e-9);
    const double compat = d.max_abs_compatibility();
    ctx.checks.add("compatibility", compat, 1e-10, compat <= 1e-10);
    const double lo = d.min_concentration();
    ctx.checks.add("nonnegativity", lo, -1e-12, lo >= -1e-12);
    const double mean_phi = summary["max_abs_mean_potential"].get<double>();
    ctx.checks.add("zero_mean_potential", mean_phi, 1e-12, mean_phi <= 1e-12);
    const double rise = relative_energy_increase(d);
    ctx.checks.add("energy_decay", rise, 1e-8, rise <= 1e-8);
    const double lp = lp_bound_ratio(d, cfg.scaling.eta, cfg.scaling.p);
    ctx.checks.add("lp_bound", lp, 1.0, lp <= 1.0);
  }
  return report;
}

json macro_pipeline(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const auto start = Clock::now();
  const EffectiveTensor tensor = effective_tensor_for(cfg);
  const MacroSetup setup = build_macro_model(cfg, tensor);
  const MaskedGrid& grid = *setup.grid;
  SnapshotWriter snapshots(ctx.dir, grid, cfg.output.snapshot_every, "c0", "phi0");
  const RunResult r = run_macro(cfg, setup, snapshots.observer());
  snapshots.finish(r.final_state);
  ctx.dir.write("diagnostics.csv", diagnostics_csv(r.diagnostics, "c0", "phi0"));
  ctx.timing["macro_seconds"] = seconds_since(start);

  double s_mean = 0.0;
  for (double v : setup.source.volumetric) s_mean += v;
  if (!setup.source.volumetric.empty()) s_mean /= static_cast<double>(setup.source.volumetric.size());

  json report;
  report["mode"] = to_string(setup.mode);
  report["resolution"] = grid.cells_per_axis();
  report["A_hom"] = matrix_json(tensor.a_hom, tensor.dimension);
  report["porosity"] = tensor.porosity;
  report["interface_measure"] = setup.source.interface_measure;
  report["mean_volumetric_source"] = s_mean;
  report["g_shift"] = setup.g_shift;
  report["potential_every_step"] =
      setup.mode == MacroMode::coupled || cfg.solver.poisson_every_step;
  report["summary"] = run_summary(r, cfg.scaling.eta, cfg.scaling.p);

  ctx.checks.require("run_completed", !r.failed);
  if (!r.diagnostics.samples.empty()) {
    const auto& d = r.diagnostics;
    const double drift = d.max_relative_mass_drift();
    ctx.checks.add("mass_conservation", drift, 1e-9, drift <= 1e-9);
    const double lo = d.min_concentration();
    ctx.checks.add("nonnegativity", lo, -1e-12, lo >= -1e-12);
    const double mean_phi = report["summary"]["max_abs_mean_potential"].get<double>();
    ctx.checks.add("zero_mean_potential", mean_phi, 1e-12, mean_phi <= 1e-12);
  }
  return report;
}

json converge_pipeline(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  if (cfg.study.m_list.size() < 2)
    throw ConfigError("converge needs study.m_list with at least two entries");
  const auto start = Clock::now();
  const ConvergenceReport c =
      run_convergence_study(cfg, cfg.study.m_list, cfg.solver.macro_resolution);
  ctx.timing["total_seconds"] = seconds_since(start);
  ctx.timing["macro_seconds"] = c.macro_runtime;
  json runtimes = json::array();
  for (const auto& l : c.levels) runtimes.push_back({{"m", l.m}, {"seconds", l.runtime}});
  ctx.timing["micro_seconds"] = runtimes;

  json report;
  report["mode"] = to_string(c.mode);
  report["macro_resolution"] = c.macro_resolution;
  report["A_hom"] = matrix_json(c.a_hom, c.dimension);
  report["porosity"] = c.porosity;
  report["physics_hash"] = c.physics_hash;
  json eps = json::array();
  json levels = json::array();
  bool finite = true;
  for (const auto& l : c.levels) {
    eps.push_back(l.epsilon);
    for (double e : l.conc_error) finite = finite && std::isfinite(e);
    finite = finite && std::isfinite(l.phi_error) && std::isfinite(l.phi_corrected_error);
    levels.push_back({{"m", l.m},
                      {"epsilon", l.epsilon},
                      {"concentration_error", l.conc_error},
                      {"potential_error", l.phi_error},
                      {"potential_corrected_error", l.phi_corrected_error},
                      {"initial_energy", l.initial_energy},
                      {"max_energy", l.max_energy},
                      {"max_concentration", l.max_concentration},
                      {"max_relative_mass_drift", l.mass_drift},
                      {"steps", l.steps}});
  }
  report["epsilon"] = eps;
  report["levels"] = levels;

  ctx.checks.require("errors_finite", finite);
  ctx.checks.require("concentration_errors_decrease", c.concentration_errors_decrease());
  if (c.mode == MacroMode::coupled) {
    const auto& last = c.levels.back();
    ctx.checks.add("corrector_improves_potential", last.phi_corrected_error, last.phi_error,
                   c.corrector_improves());
    ctx.checks.require("energy_bound", c.energy_bound_holds());
  }
  const double variation = c.max_bound_variation();
  ctx.checks.add("boundedness_across_epsilon", variation, 0.2, variation <= 0.2);
  return report;
}

json mms_pipeline(Context& ctx) {
  const auto start = Clock::now();
  const MmsReport m = run_mms_suite(ctx.config.study.mms_resolutions);
  ctx.timing["total_seconds"] = seconds_since(start);
  json report;
  report["resolutions"] = ctx.config.study.mms_resolutions;
  json results = json::array();
  for (const auto& r : m.results) {
    json j = {{"kind", to_string(r.kind)}, {"h", r.h},        {"errors", r.errors},
              {"order", r.order},          {"max_error", r.max_error}, {"passed", r.passed}};
    if (r.kind == MmsKind::constant) {
      ctx.checks.add("mms_constant", r.max_error, 1e-13, r.passed);
    } else {
      j["min_order"] = r.min_order;
      if (std::isfinite(r.max_order)) j["max_order"] = r.max_order;
      ctx.checks.add(std::string("mms_") + to_string(r.kind), r.order, r.min_order, r.passed);
    }
    results.push_back(j);
  }
  report["results"] = results;
  return report;
}

json eta_pipeline(Context& ctx) {
  const RunConfig& cfg = ctx.config;
  if (cfg.study.eta_list.empty()) throw ConfigError("eta-sweep needs study.eta_list");
  const auto start = Clock::now();
  const EtaSweepReport e = run_eta_sweep(cfg, cfg.study.eta_list);
  ctx.timing["total_seconds"] = seconds_since(start);
  const MaskedGrid grid = build_uniform_grid(cfg.geometry.dimension, e.macro_resolution);
  json report;
  report["macro_resolution"] = e.macro_resolution;
  json entries = json::array();
  bool all_ok = true;
  for (std::size_t k = 0; k < e.entries.size(); ++k) {
    const auto& en = e.entries[k];
    all_ok = all_ok && !en.failed;
    const std::string name = "eta_" + std::to_string(k + 1) + "_final.csv";
    if (!en.final_state.conc.empty())
      ctx.dir.write(name, snapshot_csv(grid, en.final_state, "c0", "phi0"));
    entries.push_back({{"eta", en.eta},
                       {"final_energy", en.final_energy},
                       {"failed", en.failed},
                       {"failure", en.failure},
                       {"final_state", name}});
  }
  report["entries"] = entries;
  report["distances"] = e.distances;
  report["distances_monotone"] = e.distances_monotone;
  ctx.checks.require("runs_completed", all_ok);
  return report;
}

ExitStatus status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::configuration:
    case ErrorKind::geometry:
    case ErrorKind::alignment:
      return ExitStatus::config_error;
    case ErrorKind::io:
      return ExitStatus::io_error;
    case ErrorKind::verification:
      return ExitStatus::check_failed;
    default:
      return ExitStatus::run_error;
  }
}

}  // namespace

void apply_flags(RunConfig& config, const RunFlags& flags) {
  if (flags.poisson_every_step) {
    config.solver.poisson_every_step = true;
    config.document["solver"]["poisson_every_step"] = true;
  }
  if (flags.explicit_time) {
    config.solver.explicit_time = true;
    config.document["solver"]["explicit_time"] = true;
  }
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"cell", "micro", "macro", "converge", "mms",
                                              "eta-sweep"};
  return names;
}

DispatchResult dispatch(const std::string& subcommand, const RunConfig& config,
                        const std::filesystem::path& out) {
  DispatchResult result;
  json (*pipeline)(Context&) = nullptr;
  if (subcommand == "cell") pipeline = cell_pipeline;
  else if (subcommand == "micro") pipeline = micro_pipeline;
  else if (subcommand == "macro") pipeline = macro_pipeline;
  else if (subcommand == "converge") pipeline = converge_pipeline;
  else if (subcommand == "mms") pipeline = mms_pipeline;
  else if (subcommand == "eta-sweep") pipeline = eta_pipeline;
  if (!pipeline) {
    result.status = ExitStatus::usage_error;
    result.message = "unknown subcommand '" + subcommand + "'";
    return result;
  }

  std::unique_ptr<RunDirectory> dir;
  try {
    dir = std::make_unique<RunDirectory>(out);
  } catch (const Error& e) {
    result.status = ExitStatus::io_error;
    result.message = e.what();
    return result;
  }

  Context ctx{config, *dir, {}, json::object()};
  try {
    json report = pipeline(ctx);
    report["subcommand"] = subcommand;
    report["checks"] = ctx.checks.to_json();
    dir->write_json("report.json", report);
    result.failed_checks = ctx.checks.failed();
    if (!result.failed_checks.empty()) {
      result.status = ExitStatus::check_failed;
      result.message = "failed checks:";
      for (const auto& name : result.failed_checks) result.message += " " + name;
    }
  } catch (const Error& e) {
    result.status = status_for(e);
    result.message = std::string(to_string(e.kind())) + " error: " + e.what();
  } catch (const std::exception& e) {
    result.status = ExitStatus::run_error;
    result.message = std::string("error: ") + e.what();
  }

  try {
    dir->write_json("timing.json", ctx.timing);
    json manifest;
    manifest["tool"] = "porohom";
    manifest["subcommand"] = subcommand;
    manifest["versions"] = {{"porohom", POROHOM_VERSION},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)},
                            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                                  "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    manifest["config"] = config.document;
    manifest["config_hash"] = config_hash(config);
    manifest["physics_hash"] = physics_hash(config);
    manifest["xi2_shift"] = config.surface.xi2_shift;
    manifest["files"] = dir->inventory();
    manifest["exit_status"] = static_cast<int>(result.status);
    manifest["message"] = result.message;
    manifest["failed_checks"] = result.failed_checks;
    dir->write_json("manifest.json", manifest);
  } catch (const Error& e) {
    result.status = ExitStatus::io_error;
    result.message = e.what();
  }
  return result;
}

}  // namespace porohom
