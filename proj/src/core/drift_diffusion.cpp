#include "drift_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "nonlinearity.hpp"

namespace porohom {

namespace {

// Concentrations may sit a rounding error below zero after an accepted step.
double hp(double r, double eta, double p) { return h_p(std::max(r, 0.0), eta, p); }
double hp_prime(double r, double eta, double p) { return h_p_prime(std::max(r, 0.0), eta, p); }

}  // namespace

double compatibility_residual(const TransportModel& model, const FieldState& state) {
  const MaskedGrid& g = model.grid();
  double bulk = 0.0;
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    if (model.species[i].charge == 0) continue;
    double mass = 0.0;
    for (double c : state.conc[i]) mass += c;
    bulk += model.species[i].charge * mass;
  }
  for (double s : model.fixed_charge) bulk += s;
  double surface = 0.0;
  for (double q : model.hole_charge) surface += q;
  for (double q : model.outer_charge) surface += q;
  return bulk * g.cell_volume() + surface * g.face_area();
}

double compatibility_scale(const TransportModel& model, const FieldState& state) {
  const MaskedGrid& g = model.grid();
  double bulk = 0.0;
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    double mass = 0.0;
    for (double c : state.conc[i]) mass += std::abs(c);
    bulk += std::abs(model.species[i].charge) * mass;
  }
  for (double s : model.fixed_charge) bulk += std::abs(s);
  double surface = 0.0;
  for (double q : model.hole_charge) surface += std::abs(q);
  for (double q : model.outer_charge) surface += std::abs(q);
  return std::max(bulk * g.cell_volume() + surface * g.face_area(), 1.0);
}

CgResult solve_potential(const TransportModel& model, const FieldState& state,
                         std::vector<double>& phi, const PoissonOptions& options) {
  const MaskedGrid& g = model.grid();
  const std::size_t n = g.fluid_cells();
  const double h = g.spacing();
  phi.resize(n, 0.0);

  const double residual = compatibility_residual(model, state);
  if (!options.project_rhs &&
      std::abs(residual) > options.compatibility_tolerance * compatibility_scale(model, state))
    throw Error(ErrorKind::state,
                "charge compatibility violated: residual " + std::to_string(residual));

  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    const int z = model.species[i].charge;
    if (z == 0) continue;
    for (std::size_t k = 0; k < n; ++k) rhs[k] += z * state.conc[i][k];
  }
  if (!model.fixed_charge.empty())
    for (std::size_t k = 0; k < n; ++k) rhs[k] += model.fixed_charge[k];
  for (double& v : rhs) v *= h * h;
  const auto& holes = g.hole_faces();
  for (std::size_t f = 0; f < model.hole_charge.size(); ++f)
    rhs[static_cast<std::size_t>(holes[f].cell)] += h * model.hole_charge[f];
  const auto& outer = g.outer_faces();
  for (std::size_t f = 0; f < model.outer_charge.size(); ++f)
    rhs[static_cast<std::size_t>(outer[f].cell)] += h * model.outer_charge[f];

  CgOptions cg;
  cg.tolerance = options.tolerance;
  cg.max_iterations = options.max_iterations;
  cg.singular = true;
  const double kappa = model.permittivity;
  const FvOperator& op = *model.op;
  CgResult res = conjugate_gradient(
      [&](std::span<const double> x, std::span<double> y) {
        op.apply(x, y);
        for (double& v : y) v *= kappa;
      },
      rhs, phi, cg);
  remove_mean(phi);
  return res;
}

std::vector<double> drift_velocity(const TransportModel& model, std::span<const double> phi,
                                   std::size_t species) {
  const auto& faces = model.grid().interior_faces();
  std::vector<double> v(faces.size(), 0.0);
  const double coeff = model.drift_scale * model.species[species].diffusivity *
                       model.species[species].charge;
  if (coeff == 0.0) return v;
  model.op->normal_gradient(phi, v);
  for (double& x : v) x *= -coeff;
  return v;
}

FaceFluxSet compute_fluxes(const TransportModel& model, const FieldState& state) {
  const MaskedGrid& g = model.grid();
  const auto& faces = g.interior_faces();
  const double h = g.spacing();
  FaceFluxSet set;
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    const auto& c = state.conc[i];
    std::vector<double> hc(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) hc[k] = hp(c[k], model.eta, model.p);
    std::vector<double> diff(faces.size());
    if (model.op->has_cross_terms()) {
      model.op->normal_gradient(hc, diff);
      for (double& x : diff) x *= -model.species[i].diffusivity;
    } else {
      for (std::size_t f = 0; f < faces.size(); ++f)
        diff[f] = -model.species[i].diffusivity * model.op->tensor()(faces[f].dir, faces[f].dir) *
                  (hc[faces[f].hi] - hc[faces[f].lo]) / h;
    }
    const std::vector<double> v = drift_velocity(model, state.phi, i);
    std::vector<double> drift(faces.size());
    std::vector<double> total(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double upwind = v[f] > 0.0 ? c[faces[f].lo] : c[faces[f].hi];
      drift[f] = v[f] * upwind;
      total[f] = diff[f] + drift[f];
    }
    set.diffusive.push_back(std::move(diff));
    set.drift.push_back(std::move(drift));
    set.total.push_back(std::move(total));
  }
  return set;
}

double max_drift_speed(const TransportModel& model, const FieldState& state) {
  double speed = 0.0;
  for (std::size_t i = 0; i < model.species_count(); ++i)
    for (double v : drift_velocity(model, state.phi, i)) speed = std::max(speed, std::abs(v));
  return speed;
}

double field_energy(const TransportModel& model, std::span<const double> phi) {
  return 0.5 * model.field_energy_scale * model.op->dirichlet_energy(phi);
}

double entropy(const TransportModel& model, std::span<const double> conc) {
  double s = 0.0;
  for (double c : conc) s += psi(std::max(c, 0.0), model.eta, model.p);
  return s * model.grid().cell_volume();
}

double energy(const TransportModel& model, const FieldState& state) {
  double v = field_energy(model, state.phi);
  for (const auto& c : state.conc) v += entropy(model, c);
  return v;
}

double explicit_diffusion_limit(const TransportModel& model, const FieldState& state) {
  const MaskedGrid& g = model.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    double cmax = 0.0;
    for (double c : state.conc[i]) cmax = std::max(cmax, c);
    worst = std::max(worst, model.species[i].diffusivity * hp_prime(cmax, model.eta, model.p));
  }
  double amax = 0.0;
  for (int d = 0; d < g.dimension(); ++d)
    for (int e = 0; e < g.dimension(); ++e) amax += std::abs(model.op->tensor()(d, e));
  if (worst == 0.0 || amax == 0.0) return std::numeric_limits<double>::infinity();
  return g.spacing() * g.spacing() / (2.0 * worst * amax);
}

FieldState step(const TransportModel& model, const FieldState& state, double dt,
                const StepOptions& options, StepStats* stats) {
  if (!(dt > 0.0)) throw Error(ErrorKind::domain, "time step must be positive");
  const MaskedGrid& g = model.grid();
  const FvOperator& op = *model.op;
  const std::size_t n = g.fluid_cells();
  const double h = g.spacing();
  const auto& faces = g.interior_faces();
  const auto& corners = op.corners();
  const double shift = h * h / dt;
  const double t_next = state.t + dt;

  FieldState next;
  next.t = t_next;
  next.conc.resize(model.species_count());

  std::vector<double> rhs(n), face_w(faces.size()), corner_w(corners.size()), work(n);
  for (std::size_t i = 0; i < model.species_count(); ++i) {
    const auto& c = state.conc[i];
    const double D = model.species[i].diffusivity;

    // Explicit upwind drift: net outflow per cell, scaled by h^{2-n}.
    std::vector<double> outflow(n, 0.0);
    const std::vector<double> v = drift_velocity(model, state.phi, i);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (v[f] == 0.0) continue;
      const double flux = h * v[f] * (v[f] > 0.0 ? c[faces[f].lo] : c[faces[f].hi]);
      outflow[faces[f].lo] += flux;
      outflow[faces[f].hi] -= flux;
    }

    std::vector<double> source(n, 0.0);
    if (options.source) {
      for (std::size_t k = 0; k < n; ++k)
        source[k] = h * h * options.source(i, t_next, g.center(static_cast<int>(k)));
    }

    std::vector<double>& out = next.conc[i];
    if (options.explicit_time) {
      std::vector<double> hc(n);
      for (std::size_t k = 0; k < n; ++k) hc[k] = hp(c[k], model.eta, model.p);
      op.apply(hc, work);
      out.resize(n);
      for (std::size_t k = 0; k < n; ++k)
        out[k] = c[k] + (source[k] - D * work[k] - outflow[k]) / shift;
    } else {
      for (std::size_t f = 0; f < faces.size(); ++f)
        face_w[f] = D * hp_prime(0.5 * (c[faces[f].lo] + c[faces[f].hi]), model.eta, model.p);
      for (std::size_t k = 0; k < corners.size(); ++k) {
        const auto& q = corners[k];
        const double avg = 0.25 * (c[q.p] + c[q.pd] + c[q.pe] + c[q.pde]);
        corner_w[k] = D * hp_prime(avg, model.eta, model.p);
      }
      double rhs_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        rhs[k] = shift * c[k] - outflow[k] + source[k];
        rhs_sum += rhs[k];
      }
      std::vector<double> inv_diag = op.diagonal(face_w, corner_w, shift);
      for (double& d : inv_diag) d = 1.0 / d;
      out = c;
      CgOptions cg;
      cg.tolerance = options.linear_tolerance;
      cg.max_iterations = options.max_iterations;
      const CgResult res = conjugate_gradient(
          [&](std::span<const double> x, std::span<double> y) {
            op.apply_weighted(face_w, corner_w, shift, x, y);
          },
          rhs, out, cg, inv_diag);
      if (stats) stats->transport_iterations += res.iterations;
      // 1ᵀK = 0, so the exact solution carries mass Σrhs/shift; remove the
      // solver's share of the discrepancy with a uniform shift.
      double sum = 0.0;
      for (double x : out) sum += x;
      const double delta = (rhs_sum / shift - sum) / static_cast<double>(n);
      for (double& x : out) x += delta;
    }

    const double lowest = *std::min_element(out.begin(), out.end());
    if (lowest < -options.negativity_tolerance)
      throw Error(ErrorKind::step_rejected,
                  "species " + std::to_string(i + 1) + " reached " + std::to_string(lowest) +
                      " with dt=" + std::to_string(dt));
  }

  next.phi = state.phi;
  if (options.solve_potential) {
    const CgResult res = solve_potential(model, next, next.phi, options.poisson);
    if (stats) stats->poisson_iterations += res.iterations;
  }
  return next;
}

}  // namespace porohom
