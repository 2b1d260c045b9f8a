#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace porohom {

double DiagnosticsRecord::max_relative_mass_drift() const {
  double worst = 0.0;
  if (samples.empty()) return worst;
  const auto& first = samples.front().mass;
  for (const auto& s : samples)
    for (std::size_t i = 0; i < first.size(); ++i) {
      const double scale = std::max(std::abs(first[i]), 1e-300);
      worst = std::max(worst, std::abs(s.mass[i] - first[i]) / scale);
    }
  return worst;
}

double DiagnosticsRecord::max_abs_compatibility() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.compatibility));
  return worst;
}

double DiagnosticsRecord::min_concentration() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    for (double v : s.min_conc) lo = std::min(lo, v);
  return lo;
}

double DiagnosticsRecord::max_concentration() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    for (double v : s.max_conc) hi = std::max(hi, v);
  return hi;
}

double DiagnosticsRecord::max_energy_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < samples.size(); ++k)
    worst = std::max(worst, samples[k].energy - samples[k - 1].energy);
  return worst;
}

DiagnosticsSample sample_diagnostics(const TransportModel& model, const FieldState& state,
                                     double last_dt) {
  const MaskedGrid& g = model.grid();
  DiagnosticsSample s;
  s.t = state.t;
  s.dt = last_dt;
  for (const auto& c : state.conc) {
    double mass = 0.0;
    double lp = 0.0;
    for (double v : c) {
      mass += v;
      lp += std::pow(std::abs(v), model.p);
    }
    s.mass.push_back(mass * g.cell_volume());
    s.lp_norm_p.push_back(lp * g.cell_volume());
    s.min_conc.push_back(*std::min_element(c.begin(), c.end()));
    s.max_conc.push_back(*std::max_element(c.begin(), c.end()));
    s.grad_conc_norm.push_back(std::sqrt(std::max(model.op->dirichlet_energy(c), 0.0)));
  }
  s.energy = energy(model, state);
  s.mean_phi = mean(state.phi);
  s.compatibility = compatibility_residual(model, state);
  s.grad_phi_norm =
      model.permittivity * std::sqrt(std::max(model.op->dirichlet_energy(state.phi), 0.0));
  return s;
}

FieldState make_initial_state(const TransportModel& model,
                              std::vector<std::vector<double>> conc,
                              const PoissonOptions& poisson) {
  FieldState state;
  state.conc = std::move(conc);
  state.phi.assign(model.grid().fluid_cells(), 0.0);
  solve_potential(model, state, state.phi, poisson);
  return state;
}

RunResult run_trajectory(const TransportModel& model, FieldState initial,
                         const RunControl& control, const OutputObserver& observer) {
  RunResult result;
  FieldState state = std::move(initial);
  const double T = control.final_time;
  const double h = model.grid().spacing();

  auto record = [&](double dt) {
    DiagnosticsSample s = sample_diagnostics(model, state, dt);
    if (observer) observer(state, s);
    result.diagnostics.samples.push_back(std::move(s));
  };

  try {
    record(0.0);
    int output_index = 1;
    StepOptions opts = control.step;
    opts.solve_potential = control.potential_every_step;
    double last_dt = 0.0;
    while (state.t < T) {
      double target = T;
      if (control.output_interval > 0.0)
        target = std::min(T, output_index * control.output_interval);
      // Snap output times that land within rounding of the current time.
      if (target - state.t <= 1e-12 * std::max(1.0, T)) {
        ++output_index;
        continue;
      }
      while (state.t < target) {
        double dt = std::min(control.dt_max, target - state.t);
        const double speed = max_drift_speed(model, state);
        if (speed > 0.0) dt = std::min(dt, control.cfl_safety * h / speed);
        if (opts.explicit_time)
          dt = std::min(dt, control.cfl_safety * explicit_diffusion_limit(model, state));
        // Avoid leaving a sliver before the target.
        if (target - state.t - dt < 1e-9 * dt) dt = target - state.t;
        for (;;) {
          try {
            FieldState next = step(model, state, dt, opts);
            if (target - next.t <= 1e-12 * std::max(1.0, T)) next.t = target;
            state = std::move(next);
            last_dt = dt;
            ++result.steps;
            break;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::step_rejected) throw;
            ++result.rejected_steps;
            dt *= 0.5;
            if (dt < control.dt_min)
              throw Error(ErrorKind::step_rejected,
                          std::string("time step fell below dt_min: ") + e.what());
          }
        }
        if (control.output_interval <= 0.0 && state.t < target) {
          if (!control.potential_every_step) solve_potential(model, state, state.phi, opts.poisson);
          record(last_dt);
        }
      }
      if (!control.potential_every_step) solve_potential(model, state, state.phi, opts.poisson);
      record(last_dt);
      ++output_index;
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.failure = e.what();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace porohom
