#ifndef POROHOM_POROHOM_H
#define POROHOM_POROHOM_H

#include <stddef.h>

#if defined(_WIN32)
#define PHM_API __declspec(dllexport)
#else
#define PHM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phm_status {
  PHM_OK = 0,
  PHM_ERR_ARGUMENT = 1,
  PHM_ERR_CONFIG = 2,
  PHM_ERR_GEOMETRY = 3,
  PHM_ERR_SOLVER = 4,
  PHM_ERR_STATE = 5,
  PHM_ERR_IO = 6,
  PHM_ERR_CHECK = 7,
  PHM_ERR_INTERNAL = 8
} phm_status;

typedef enum phm_flag {
  PHM_FLAG_POISSON_EVERY_STEP = 1,
  PHM_FLAG_EXPLICIT_TIME = 2
} phm_flag;

/* A validated run configuration. */
typedef struct phm_session phm_session;
/* A live micro-model state that can be stepped. */
typedef struct phm_micro phm_micro;

PHM_API const char* phm_version(void);

/* Message of the last failure on the calling thread, "" if none. */
PHM_API const char* phm_last_error(void);

PHM_API phm_status phm_session_from_text(const char* config_json, phm_session** out);
PHM_API phm_status phm_session_from_file(const char* path, phm_session** out);
PHM_API void phm_session_free(phm_session* session);

PHM_API phm_status phm_session_set_flag(phm_session* session, phm_flag flag, int enabled);

/* Hex SHA-256 of the normalized config; valid while the session lives. */
PHM_API const char* phm_session_hash(const phm_session* session);

/* Subcommands: cell, micro, macro, converge, mms, eta-sweep. Artifacts go to
 * out_dir. exit_code receives the process exit status the CLI would use
 * (0 ok, 1 failed check, 2 config, 3 run, 4 io, 64 usage). */
PHM_API phm_status phm_run(phm_session* session, const char* subcommand,
                           const char* out_dir, int* exit_code);

/* Row-major n×n effective tensor of the configured cell. `capacity` is the
 * length of a_hom (needs n*n). */
PHM_API phm_status phm_effective_tensor(phm_session* session, double* a_hom,
                                        size_t capacity, int* dimension,
                                        double* porosity);

PHM_API phm_status phm_micro_create(const phm_session* session, phm_micro** out);
PHM_API void phm_micro_free(phm_micro* micro);

/* One step of length dt (no adaptive control). */
PHM_API phm_status phm_micro_step(phm_micro* micro, double dt);
/* Runs to the configured final time with the configured step control. */
PHM_API phm_status phm_micro_run(phm_micro* micro);

PHM_API double phm_micro_time(const phm_micro* micro);
PHM_API size_t phm_micro_cells(const phm_micro* micro);
PHM_API size_t phm_micro_species(const phm_micro* micro);

/* Copies species `species` (0-based) or the potential into buffer. */
PHM_API phm_status phm_micro_concentration(const phm_micro* micro, size_t species,
                                           double* buffer, size_t capacity);
PHM_API phm_status phm_micro_potential(const phm_micro* micro, double* buffer,
                                       size_t capacity);

PHM_API phm_status phm_micro_mass(const phm_micro* micro, size_t species, double* mass);
PHM_API phm_status phm_micro_energy(const phm_micro* micro, double* energy);

#ifdef __cplusplus
}
#endif

#endif
