#pragma once

#include <string>
#include <vector>

#include "cell_problem.hpp"
#include "config.hpp"
#include "simulation.hpp"

namespace porohom {

/// Discrete L² distance over the fluid cells of `grid`, normalized by
/// |Ω_ε|^{1/2}.
double l2_distance(const MaskedGrid& grid, const std::vector<double>& a,
                   const std::vector<double>& b);

/// Same, after removing the mean of a - b (potentials are defined up to a
/// constant on different supports).
double l2_distance_modulo_mean(const MaskedGrid& grid, const std::vector<double>& a,
                               const std::vector<double>& b);

/// Largest ratio η/(p-1)·||c_i||_p^p / V(0) over the recorded samples; ≤ 1
/// when the bound implied by the energy estimate holds.
double lp_bound_ratio(const DiagnosticsRecord& record, double eta, double p);

/// Largest V(t_{m+1}) - V(t_m) relative to V(0).
double relative_energy_increase(const DiagnosticsRecord& record);

struct ConvergenceLevel {
  int m = 0;
  double epsilon = 0.0;
  std::vector<double> conc_error;   // per species
  double phi_error = 0.0;           // ε^α φ_ε vs φ0
  double phi_corrected_error = 0.0; // vs φ0 + ε Σ ∂_kφ0 w_k
  double initial_energy = 0.0;
  double max_energy = 0.0;
  double max_concentration = 0.0;
  double mass_drift = 0.0;
  int steps = 0;
  double runtime = 0.0;  // seconds, not part of the report
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;  // ε strictly decreasing
  MacroMode mode = MacroMode::coupled;
  int macro_resolution = 0;
  double porosity = 1.0;
  Eigen::Matrix3d a_hom = Eigen::Matrix3d::Identity();
  int dimension = 2;
  double macro_runtime = 0.0;
  std::string physics_hash;

  bool concentration_errors_decrease() const;
  /// Corrector-enhanced potential error at the finest ε ≤ the plain one.
  bool corrector_improves() const;
  /// max_t V_ε ≤ 2·max_ε V_ε(0).
  bool energy_bound_holds() const;
  /// Largest relative change of max_t,x c between consecutive ε levels.
  double max_bound_variation() const;
};

/// Runs the micro model for every m in `m_list` and the macro model once on a
/// grid with `macro_resolution` cells per axis (0: finest micro grid), then
/// compares at t = T on the micro fluid cells.
ConvergenceReport run_convergence_study(const RunConfig& base, const std::vector<int>& m_list,
                                        int macro_resolution = 0,
                                        MacroMode mode = MacroMode::automatic);

enum class MmsKind { poisson_micro, poisson_macro, diffusion_space, diffusion_time, constant };

const char* to_string(MmsKind kind);

struct MmsResult {
  MmsKind kind = MmsKind::poisson_micro;
  std::vector<double> h;       // or Δt for diffusion_time
  std::vector<double> errors;
  double order = 0.0;          // least-squares slope of log error vs log h
  double min_order = 0.0;
  double max_order = 0.0;      // +inf when unbounded
  double max_error = 0.0;
  bool passed = false;
};

/// Manufactured-solution check for one solver on unperforated grids.
MmsResult run_mms_verification(MmsKind kind, const std::vector<int>& resolutions);

struct MmsReport {
  std::vector<MmsResult> results;
  bool passed() const;
};

MmsReport run_mms_suite(const std::vector<int>& resolutions);

/// Least-squares slope of log(e) against log(h).
double observed_order(const std::vector<double>& h, const std::vector<double>& e);

struct EtaSweepEntry {
  double eta = 0.0;
  FieldState final_state;
  double final_energy = 0.0;
  bool failed = false;
  std::string failure;
};

struct EtaSweepReport {
  std::vector<EtaSweepEntry> entries;
  std::vector<double> distances;  // between successive final states
  bool distances_monotone = false;  // logged only
  int macro_resolution = 0;
};

EtaSweepReport run_eta_sweep(const RunConfig& macro_config, const std::vector<double>& eta_list);

}  // namespace porohom
