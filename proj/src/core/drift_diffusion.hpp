#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fv_operator.hpp"
#include "linear_solver.hpp"

namespace porohom {

struct SpeciesParams {
  double diffusivity = 1.0;
  int charge = 0;
};

/// Shared discrete model behind the micro and macro solvers:
///   ∂t c_i - ∇·(D_i A ∇h_p(c_i) + drift_scale D_i z_i c_i A∇φ) = 0,
///   -permittivity ∇·(A∇φ) = Σ z_i c_i + fixed_charge,
/// with no-flux species boundaries and Neumann data for φ on holes and ∂Ω.
struct TransportModel {
  std::shared_ptr<const FvOperator> op;
  std::vector<SpeciesParams> species;
  double eta = 1.0;
  double p = 4.0;
  double drift_scale = 1.0;
  double permittivity = 1.0;
  double field_energy_scale = 1.0;
  std::vector<double> fixed_charge;  // per fluid cell; empty = none
  std::vector<double> hole_charge;   // per hole face (flux density)
  std::vector<double> outer_charge;  // per outer face (flux density)

  const MaskedGrid& grid() const { return op->grid(); }
  std::size_t species_count() const { return species.size(); }
};

struct FieldState {
  double t = 0.0;
  std::vector<std::vector<double>> conc;  // [species][fluid cell]
  std::vector<double> phi;                // zero mean over fluid cells
};

/// Per-species total flux J_i·e_d on each interior face, oriented lo -> hi.
struct FaceFluxSet {
  std::vector<std::vector<double>> total;
  std::vector<std::vector<double>> diffusive;
  std::vector<std::vector<double>> drift;
};

/// Σ_i z_i ∫ c_i + ∫ fixed_charge + ∮ boundary charge.
double compatibility_residual(const TransportModel& model, const FieldState& state);
/// Magnitude used to judge the residual: same sum with absolute values.
double compatibility_scale(const TransportModel& model, const FieldState& state);

struct PoissonOptions {
  double tolerance = 1e-11;
  int max_iterations = 20000;
  double compatibility_tolerance = 1e-10;
  /// Drop any incompatible part of the right-hand side instead of failing.
  bool project_rhs = false;
};

/// Solves permittivity·K φ = h²(Σ z c + fixed) + h·(boundary charge); `phi`
/// carries the initial guess and returns a zero-mean solution.
CgResult solve_potential(const TransportModel& model, const FieldState& state,
                         std::vector<double>& phi, const PoissonOptions& options = {});

/// Drift velocity per face for one species: v = -drift_scale D z (A∇φ)·e_d.
std::vector<double> drift_velocity(const TransportModel& model, std::span<const double> phi,
                                   std::size_t species);

FaceFluxSet compute_fluxes(const TransportModel& model, const FieldState& state);

/// Largest |drift velocity| over faces and species.
double max_drift_speed(const TransportModel& model, const FieldState& state);

double field_energy(const TransportModel& model, std::span<const double> phi);
double entropy(const TransportModel& model, std::span<const double> conc);
/// V = ½ s Σ∇φ·A∇φ h^n + Σ_i Σ Ψ(c_i) h^n.
double energy(const TransportModel& model, const FieldState& state);

/// Volumetric source for manufactured problems: f(species, t, x).
using SourceTerm = std::function<double(std::size_t, double, const Point&)>;

struct StepOptions {
  bool explicit_time = false;
  bool solve_potential = true;
  double linear_tolerance = 1e-12;
  int max_iterations = 20000;
  double negativity_tolerance = 1e-12;
  PoissonOptions poisson;
  SourceTerm source;  // evaluated at t^{m+1}, implicit
};

struct StepStats {
  int transport_iterations = 0;
  int poisson_iterations = 0;
};

/// One time step: drift explicit with upwinding, diffusion implicit with the
/// face coefficient h_p'((c_L+c_R)/2) frozen at t^m, then a fresh potential.
/// Throws Error(step_rejected) when a concentration drops below
/// -negativity_tolerance; the input state is left untouched.
FieldState step(const TransportModel& model, const FieldState& state, double dt,
                const StepOptions& options, StepStats* stats = nullptr);

/// Upper bound on Δt for the explicit diffusion path.
double explicit_diffusion_limit(const TransportModel& model, const FieldState& state);

}  // namespace porohom
