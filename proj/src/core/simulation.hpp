#pragma once

#include <functional>
#include <string>
#include <vector>

#include "drift_diffusion.hpp"

namespace porohom {

struct DiagnosticsSample {
  double t = 0.0;
  std::vector<double> mass;
  double energy = 0.0;
  std::vector<double> min_conc;
  std::vector<double> max_conc;
  double mean_phi = 0.0;
  double compatibility = 0.0;
  double dt = 0.0;  // last accepted step, 0 at t = 0
  double grad_phi_norm = 0.0;           // permittivity·||∇φ||
  std::vector<double> grad_conc_norm;   // ||∇c_i||
  std::vector<double> lp_norm_p;        // ||c_i||_p^p
};

struct DiagnosticsRecord {
  std::vector<DiagnosticsSample> samples;

  double max_relative_mass_drift() const;
  double max_abs_compatibility() const;
  double min_concentration() const;
  double max_concentration() const;
  /// Largest V(t_{m+1}) - V(t_m) over consecutive samples.
  double max_energy_increase() const;
};

DiagnosticsSample sample_diagnostics(const TransportModel& model, const FieldState& state,
                                     double last_dt);

struct RunControl {
  double final_time = 0.0;
  double dt_max = 1e-3;
  double output_interval = 0.0;  // <= 0: every accepted step
  double cfl_safety = 0.4;
  double dt_min = 1e-10;
  StepOptions step;
  /// When false the potential is refreshed only at output times (it must not
  /// feed back into transport, i.e. drift_scale == 0).
  bool potential_every_step = true;
};

struct RunResult {
  DiagnosticsRecord diagnostics;
  FieldState final_state;
  bool failed = false;
  std::string failure;
  int steps = 0;
  int rejected_steps = 0;
};

/// Called at t = 0 and at every output time with the current state.
using OutputObserver = std::function<void(const FieldState&, const DiagnosticsSample&)>;

/// Integrates to control.final_time. Δt = min(dt_max, safety·h/max|v|, time to
/// the next output), halved on nonnegativity rejection down to dt_min.
/// Errors are caught: the result keeps everything recorded so far and is
/// marked failed.
RunResult run_trajectory(const TransportModel& model, FieldState initial,
                         const RunControl& control, const OutputObserver& observer = {});

/// Initial state with a consistent potential.
FieldState make_initial_state(const TransportModel& model,
                              std::vector<std::vector<double>> conc,
                              const PoissonOptions& poisson);

}  // namespace porohom
