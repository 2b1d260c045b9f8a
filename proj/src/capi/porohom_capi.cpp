#include "porohom/porohom.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "cell_problem.hpp"
#include "config.hpp"
#include "error.hpp"
#include "micro_solver.hpp"
#include "pipeline.hpp"

using namespace porohom;

struct phm_session {
  RunConfig config;
  std::string hash;
};

struct phm_micro {
  RunConfig config;
  MicroSetup setup;
  FieldState state;
};

namespace {

thread_local std::string last_error;

phm_status fail(phm_status status, const std::string& message) {
  last_error = message;
  return status;
}

phm_status map_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::configuration: return fail(PHM_ERR_CONFIG, e.what());
    case ErrorKind::geometry:
    case ErrorKind::alignment: return fail(PHM_ERR_GEOMETRY, e.what());
    case ErrorKind::solver: return fail(PHM_ERR_SOLVER, e.what());
    case ErrorKind::state:
    case ErrorKind::step_rejected:
    case ErrorKind::domain: return fail(PHM_ERR_STATE, e.what());
    case ErrorKind::io: return fail(PHM_ERR_IO, e.what());
    case ErrorKind::verification:
    case ErrorKind::harness: return fail(PHM_ERR_CHECK, e.what());
  }
  return fail(PHM_ERR_INTERNAL, e.what());
}

template <class F>
phm_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const Error& e) {
    return map_error(e);
  } catch (const std::exception& e) {
    return fail(PHM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PHM_ERR_INTERNAL, "unknown exception");
  }
}

}  // namespace

extern "C" {

const char* phm_version(void) { return POROHOM_VERSION; }

const char* phm_last_error(void) { return last_error.c_str(); }

phm_status phm_session_from_text(const char* config_json, phm_session** out) {
  if (!config_json || !out) return fail(PHM_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto session = std::make_unique<phm_session>();
    session->config = parse_and_validate(config_json);
    session->hash = config_hash(session->config);
    *out = session.release();
    return PHM_OK;
  });
}

phm_status phm_session_from_file(const char* path, phm_session** out) {
  if (!path || !out) return fail(PHM_ERR_ARGUMENT, "null argument");
  std::ifstream file(path, std::ios::binary);
  if (!file) return fail(PHM_ERR_IO, std::string("cannot read ") + path);
  std::ostringstream text;
  text << file.rdbuf();
  return phm_session_from_text(text.str().c_str(), out);
}

void phm_session_free(phm_session* session) { delete session; }

phm_status phm_session_set_flag(phm_session* session, phm_flag flag, int enabled) {
  if (!session) return fail(PHM_ERR_ARGUMENT, "null session");
  if (!enabled) return PHM_OK;
  RunFlags flags;
  if (flag == PHM_FLAG_POISSON_EVERY_STEP) flags.poisson_every_step = true;
  else if (flag == PHM_FLAG_EXPLICIT_TIME) flags.explicit_time = true;
  else return fail(PHM_ERR_ARGUMENT, "unknown flag");
  apply_flags(session->config, flags);
  session->hash = config_hash(session->config);
  return PHM_OK;
}

const char* phm_session_hash(const phm_session* session) {
  return session ? session->hash.c_str() : "";
}

phm_status phm_run(phm_session* session, const char* subcommand, const char* out_dir,
                   int* exit_code) {
  if (!session || !subcommand || !out_dir) return fail(PHM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const DispatchResult r = dispatch(subcommand, session->config, out_dir);
    if (exit_code) *exit_code = static_cast<int>(r.status);
    switch (r.status) {
      case ExitStatus::ok: return PHM_OK;
      case ExitStatus::check_failed: return fail(PHM_ERR_CHECK, r.message);
      case ExitStatus::config_error: return fail(PHM_ERR_CONFIG, r.message);
      case ExitStatus::run_error: return fail(PHM_ERR_SOLVER, r.message);
      case ExitStatus::io_error: return fail(PHM_ERR_IO, r.message);
      case ExitStatus::usage_error: return fail(PHM_ERR_ARGUMENT, r.message);
    }
    return fail(PHM_ERR_INTERNAL, r.message);
  });
}

phm_status phm_effective_tensor(phm_session* session, double* a_hom, size_t capacity,
                                int* dimension, double* porosity) {
  if (!session) return fail(PHM_ERR_ARGUMENT, "null session");
  return guarded([&] {
    const GeometryConfig& g = session->config.geometry;
    const CellGeometry cell = build_cell_geometry(g.inclusion, g.r, g.dimension);
    CellSolveOptions opts;
    opts.tolerance = session->config.solver.cell_tolerance;
    const EffectiveTensor t = compute_effective_tensor(cell, opts);
    const auto n = static_cast<size_t>(t.dimension);
    if (dimension) *dimension = t.dimension;
    if (porosity) *porosity = t.porosity;
    if (a_hom) {
      if (capacity < n * n) return fail(PHM_ERR_ARGUMENT, "tensor buffer too small");
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a_hom[i * n + j] = t.a_hom(i, j);
    }
    return PHM_OK;
  });
}

phm_status phm_micro_create(const phm_session* session, phm_micro** out) {
  if (!session || !out) return fail(PHM_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto micro = std::make_unique<phm_micro>();
    micro->config = session->config;
    micro->setup = build_micro_model(micro->config);
    micro->state = make_initial_state(micro->setup.model, micro->setup.initial,
                                      poisson_options(micro->config));
    *out = micro.release();
    return PHM_OK;
  });
}

void phm_micro_free(phm_micro* micro) { delete micro; }

phm_status phm_micro_step(phm_micro* micro, double dt) {
  if (!micro) return fail(PHM_ERR_ARGUMENT, "null handle");
  return guarded([&] {
    micro->state = step_micro(micro->setup, micro->state, dt, step_options(micro->config));
    return PHM_OK;
  });
}

phm_status phm_micro_run(phm_micro* micro) {
  if (!micro) return fail(PHM_ERR_ARGUMENT, "null handle");
  return guarded([&] {
    RunControl control = run_control(micro->config);
    control.final_time = micro->config.scaling.final_time;
    RunResult r = run_trajectory(micro->setup.model, micro->state, control);
    micro->state = std::move(r.final_state);
    if (r.failed) return fail(PHM_ERR_SOLVER, r.failure);
    return PHM_OK;
  });
}

double phm_micro_time(const phm_micro* micro) { return micro ? micro->state.t : 0.0; }

size_t phm_micro_cells(const phm_micro* micro) {
  return micro ? micro->setup.grid->fluid_cells() : 0;
}

size_t phm_micro_species(const phm_micro* micro) {
  return micro ? micro->state.conc.size() : 0;
}

phm_status phm_micro_concentration(const phm_micro* micro, size_t species, double* buffer,
                                   size_t capacity) {
  if (!micro || !buffer) return fail(PHM_ERR_ARGUMENT, "null argument");
  if (species >= micro->state.conc.size()) return fail(PHM_ERR_ARGUMENT, "species out of range");
  const auto& c = micro->state.conc[species];
  if (capacity < c.size()) return fail(PHM_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buffer, c.data(), c.size() * sizeof(double));
  return PHM_OK;
}

phm_status phm_micro_potential(const phm_micro* micro, double* buffer, size_t capacity) {
  if (!micro || !buffer) return fail(PHM_ERR_ARGUMENT, "null argument");
  const auto& phi = micro->state.phi;
  if (capacity < phi.size()) return fail(PHM_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buffer, phi.data(), phi.size() * sizeof(double));
  return PHM_OK;
}

phm_status phm_micro_mass(const phm_micro* micro, size_t species, double* mass) {
  if (!micro || !mass) return fail(PHM_ERR_ARGUMENT, "null argument");
  if (species >= micro->state.conc.size()) return fail(PHM_ERR_ARGUMENT, "species out of range");
  double sum = 0.0;
  for (double v : micro->state.conc[species]) sum += v;
  *mass = sum * micro->setup.grid->cell_volume();
  return PHM_OK;
}

phm_status phm_micro_energy(const phm_micro* micro, double* value) {
  if (!micro || !value) return fail(PHM_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *value = energy(micro->setup.model, micro->state);
    return PHM_OK;
  });
}

}  // extern "C"
