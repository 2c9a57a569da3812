#ifndef FLOQ_FLOQ_H
#define FLOQ_FLOQ_H

/* C interface to the floq library: a driven spin-1/2 impurity on an XX chain.
 * All functions return a floq_status; on failure floq_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Handles are opaque and must be released with the matching *_free function. */

#include <stddef.h>

#if defined(_WIN32)
#if defined(FLOQ_BUILDING_LIBRARY)
#define FLOQ_API __declspec(dllexport)
#else
#define FLOQ_API __declspec(dllimport)
#endif
#else
#define FLOQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum floq_status {
  FLOQ_OK = 0,
  FLOQ_ERR_VALIDATION = 2,
  FLOQ_ERR_NOT_CONVERGED = 3,
  FLOQ_ERR_IO = 4,
  FLOQ_ERR_NOT_BOUND = 5,
  FLOQ_ERR_GAP_UNDEFINED = 6,
  FLOQ_ERR_NON_STEP_DRIVE = 7,
  FLOQ_ERR_STEP_NOT_COMMENSURATE = 8,
  FLOQ_ERR_MISSING_PHASE_CONVENTION = 9,
  FLOQ_ERR_NO_ROOT_IN_INTERVAL = 10,
  FLOQ_ERR_PLAN_INVALID = 11,
  FLOQ_ERR_INTERNAL = 99
} floq_status;

typedef enum floq_kernel_mode { FLOQ_KERNEL_OPEN_CHAIN = 0, FLOQ_KERNEL_PLANE_WAVE = 1 } floq_kernel_mode;

typedef enum floq_mode_class { FLOQ_BAND = 0, FLOQ_BOUND = 1, FLOQ_MARGINAL = 2 } floq_mode_class;

typedef enum floq_frame { FLOQ_FRAME_C0_PRIME = 0, FLOQ_FRAME_LAB = 1 } floq_frame;

typedef struct floq_chain {
  int L;
  double J;
  double g;
  double lambda;
  floq_kernel_mode kernel_mode;
} floq_chain;

/* A = a1 on (nT, nT+tau], a2 on (nT+tau, (n+1)T]. */
typedef struct floq_step_drive {
  double a1;
  double a2;
  double tau;
  double period;
} floq_step_drive;

typedef struct floq_state {
  double alpha_re, alpha_im;
  double beta_re, beta_im;
} floq_state;

typedef struct floq_tolerances {
  double gap_tol; /* < 0 selects the default */
  double w_min;
  int j_loc;
} floq_tolerances;

typedef struct floq_spectrum_entry {
  double quasienergy;
  floq_mode_class cls;
  double gap_distance;
  double impurity_weight;
  double region_weight;
  double localization_length;
} floq_spectrum_entry;

typedef struct floq_trajectory floq_trajectory;
typedef struct floq_spectrum floq_spectrum;
typedef struct floq_config floq_config;

/* Defaults: L=800, J=1, g=1, lambda=20, open chain; equal superposition; auto tolerances. */
FLOQ_API floq_chain floq_chain_default(void);
FLOQ_API floq_state floq_state_default(void);
FLOQ_API floq_tolerances floq_tolerances_default(void);

FLOQ_API const char* floq_version(void);
FLOQ_API const char* floq_last_error(void);
/* {"code": <int>, "error": "<name>", "message": "..."} */
FLOQ_API const char* floq_last_error_json(void);
FLOQ_API const char* floq_status_name(floq_status status);
/* Process exit code for a status: 0, 2 validation, 3 non-convergence, 4 I/O. */
FLOQ_API int floq_exit_code(floq_status status);

/* ---- dynamics ---- */

/* h = 0 selects a step commensurate with the switch times. */
FLOQ_API floq_status floq_volterra(const floq_chain* chain, const floq_step_drive* drive, double horizon, double h,
                                   int refinements, floq_trajectory** out);
FLOQ_API floq_status floq_lattice(const floq_chain* chain, const floq_step_drive* drive, double horizon,
                                  int samples_per_period, floq_trajectory** out);
FLOQ_API floq_status floq_renormalized(const floq_chain* chain, const floq_step_drive* drive, double horizon,
                                       int samples_per_period, floq_trajectory** out);
FLOQ_API void floq_trajectory_free(floq_trajectory* traj);
FLOQ_API size_t floq_trajectory_size(const floq_trajectory* traj);
FLOQ_API floq_frame floq_trajectory_frame(const floq_trajectory* traj);
/* Copies up to `capacity` values; any output pointer may be NULL. Returns the count copied. */
FLOQ_API size_t floq_trajectory_data(const floq_trajectory* traj, double* times, double* re_c0, double* im_c0,
                                     double* p, size_t capacity);
/* Fidelity of the superposition initial state, one value per trajectory sample. */
FLOQ_API floq_status floq_fidelity(const floq_trajectory* traj, const floq_state* state, double* out,
                                   size_t capacity);
/* Direct propagation of the superposition; reference for floq_fidelity. */
FLOQ_API floq_status floq_fidelity_direct(const floq_chain* chain, const floq_step_drive* drive,
                                          const floq_state* state, const double* times, size_t n, double* out);

/* ---- quasienergy spectra ---- */

FLOQ_API floq_status floq_monodromy(const floq_chain* chain, const floq_step_drive* drive,
                                    const floq_tolerances* tol, floq_spectrum** out);
/* Extended-space solver with K growth; K_max <= 0 keeps the default policy. */
FLOQ_API floq_status floq_sambe(const floq_chain* chain, const floq_step_drive* drive, const floq_tolerances* tol,
                                int K0, int K_max, double k_tol, floq_spectrum** out);
FLOQ_API void floq_spectrum_free(floq_spectrum* spectrum);
FLOQ_API size_t floq_spectrum_size(const floq_spectrum* spectrum);
FLOQ_API floq_status floq_spectrum_entry_at(const floq_spectrum* spectrum, size_t index, floq_spectrum_entry* out);
FLOQ_API int floq_spectrum_bound_count(const floq_spectrum* spectrum);
FLOQ_API int floq_spectrum_gap_undefined(const floq_spectrum* spectrum);
/* Largest circular nearest-neighbour distance between the two quasienergy sets. */
FLOQ_API double floq_spectrum_distance(const floq_spectrum* a, const floq_spectrum* b);

/* ---- Floquet bound state (monodromy spectra only) ---- */

/* Mean over one period of the asymptotic population; 0 with found = 0 when no bound mode. */
FLOQ_API floq_status floq_fbs_p_infinity(const floq_spectrum* spectrum, int samples, int* found, double* mean,
                                         double* min, double* max);
/* Populations |u_j(t)|^2 of the strongest bound mode at intra-period time t, j = 0..L. */
FLOQ_API floq_status floq_fbs_profile(const floq_spectrum* spectrum, double t, double* out, size_t capacity);
/* Asymptotic fidelity at absolute times. */
FLOQ_API floq_status floq_fbs_fidelity(const floq_spectrum* spectrum, const floq_state* state, const double* times,
                                       size_t n, double* out);

/* ---- renormalization and filtering ---- */

FLOQ_API floq_status floq_renorm_factor(const floq_step_drive* drive, int n, double* re, double* im);
/* Writes up to `capacity` roots of |F0| for a1 = -a2 in [lo, hi]; *count receives the number found. */
FLOQ_API floq_status floq_find_f0_zeros(double period, double tau, double lo, double hi, double* roots,
                                        double* residuals, size_t capacity, size_t* count);
/* |c0(t)|^2 under the filtering approximation at each time. */
FLOQ_API floq_status floq_filtered_population(const floq_chain* chain, const floq_step_drive* drive,
                                              const double* times, size_t n, double* out);

/* ---- configuration and commands ---- */

FLOQ_API floq_status floq_config_new(floq_config** out);
FLOQ_API floq_status floq_config_preset(const char* name, floq_config** out);
/* Parses INI text over the defaults. */
FLOQ_API floq_status floq_config_parse(const char* text, floq_config** out);
FLOQ_API floq_status floq_config_load(const char* path, floq_config** out);
FLOQ_API void floq_config_free(floq_config* cfg);
/* Keys are "section.key"; numbers accept a "pi" suffix. */
FLOQ_API floq_status floq_config_set(floq_config* cfg, const char* key, const char* value);
/* Returns a string owned by the handle, valid until the next call on it. */
FLOQ_API const char* floq_config_get(floq_config* cfg, const char* key);
FLOQ_API const char* floq_config_serialize(floq_config* cfg);
FLOQ_API floq_status floq_config_validate(const floq_config* cfg);

/* Runs dynamics | spectrum | fbs | filter | sweep | converge and writes its files.
 * options_json may be NULL or e.g. {"a2_scan": "0:40:0.5"}. The summary (JSON) is owned
 * by the config handle and stays valid until the next call on it. */
FLOQ_API floq_status floq_run_command(floq_config* cfg, const char* command, const char* options_json,
                                      const char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
