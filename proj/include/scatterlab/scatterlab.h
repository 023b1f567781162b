#ifndef SCATTERLAB_H
#define SCATTERLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(SCATTERLAB_BUILDING)
#define SL_API __attribute__((visibility("default")))
#else
#define SL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match scatterlab::ErrorCode. */
typedef enum {
  SL_OK = 0,
  SL_ERR_DOMAIN = 1,
  SL_ERR_CONTRACT = 2,
  SL_ERR_IDENTIFICATION = 3,
  SL_ERR_INTEGRATION = 4,
  SL_ERR_NO_CONNECTION = 5,
  SL_ERR_NOT_DIFFERENTIABLE = 6,
  SL_ERR_NEAR_GRAZING = 7,
  SL_ERR_TURNING_POINT = 8,
  SL_ERR_CONFIG = 9,
  SL_ERR_SAMPLING_MISMATCH = 10,
  SL_ERR_IO = 11,
  SL_ERR_INVALID_ARGUMENT = 12,
  SL_ERR_INTERNAL = 100
} sl_status;

#define SL_MAX_DISC_DIM 7

typedef enum { SL_EXITED = 0, SL_TRAPPED = 1, SL_GRAZING = 2 } sl_exit_status;
typedef enum { SL_METHOD_ODE = 0, SL_METHOD_QUADRATURE = 1 } sl_method;
typedef enum { SL_SAMPLING_GRID = 0, SL_SAMPLING_MONTE_CARLO = 1 } sl_sampling_kind;

typedef struct sl_manifold sl_manifold;
typedef struct sl_config sl_config;
typedef struct sl_lens_table sl_lens_table;

/* A boundary point u in S^{n-1} (u = +-1 when n = 1), an angle, and a direction of length
   n + 1 in the orthonormal boundary frame (e_1..e_n, e_theta). */
typedef struct {
  int n;
  double u[SL_MAX_DISC_DIM];
  double theta;
  double direction[SL_MAX_DISC_DIM + 1];
} sl_boundary_vector;

typedef struct {
  sl_boundary_vector entry;
  int has_exit;
  sl_boundary_vector exit;
  double travel_time; /* the budget when trapped */
  int status;         /* sl_exit_status */
} sl_lens_record;

typedef struct {
  int kind; /* sl_sampling_kind */
  int u_count, theta_count, direction_count, tangential_count;
  uint64_t samples;
  uint64_t seed;
} sl_sampling;

typedef struct {
  int method;    /* sl_method */
  double budget; /* <= 0: manifold default */
  int workers;
} sl_lens_options;

typedef struct {
  double shift, epsilon, amplitude;
} sl_bump_profile;

typedef struct {
  double volume, standard_error;
  uint64_t samples;
  double budget;
  uint64_t censored;
  double censored_fraction;
  uint64_t seed;
  double normalization;
} sl_santalo_estimate;

typedef struct {
  double budget;
  uint64_t samples, trapped, grazing;
  double fraction, standard_error, wilson_low, wilson_high;
} sl_trapped_rung;

typedef struct {
  int has_seed;
  uint64_t seed;
  int has_samples;
  long long samples;
  int has_budget;
  double budget;
  int has_workers;
  int workers;
  int has_grid;
  int grid[3];
  const char* out; /* NULL when absent; owned by the config */
} sl_config_values;

typedef void (*sl_progress_fn)(int criterion, int passed, double seconds, void* user);

/* Message of the last failed call on this thread; empty after a success. */
SL_API const char* sl_last_error(void);
SL_API const char* sl_status_name(sl_status status);
SL_API const char* sl_version(void);
/* Frees any string returned through a char** out parameter. */
SL_API void sl_string_free(char* s);

SL_API sl_status sl_manifold_preset(const char* name, sl_manifold** out);
/* Newline separated preset names. */
SL_API sl_status sl_manifold_preset_names(char** out);
SL_API sl_status sl_manifold_flat(int n, double disc_radius, double circle_length, sl_manifold** out);
SL_API sl_status sl_manifold_revolution(const sl_bump_profile* profile, sl_manifold** out);
SL_API void sl_manifold_free(sl_manifold* m);
SL_API int sl_manifold_disc_dim(const sl_manifold* m);
SL_API sl_status sl_manifold_description(const sl_manifold* m, char** out);
SL_API sl_status sl_manifold_fingerprint(const sl_manifold* m, char** out);
/* Fails with SL_ERR_CONTRACT unless the manifold is a surface of revolution. */
SL_API sl_status sl_manifold_profile(const sl_manifold* m, sl_bump_profile* out);

SL_API sl_status sl_config_parse(const char* text, sl_config** out);
SL_API sl_status sl_config_load(const char* path, sl_config** out);
SL_API void sl_config_free(sl_config* c);
SL_API sl_status sl_config_values_get(const sl_config* c, sl_config_values* out);
/* SL_ERR_CONFIG when the file names no manifold. */
SL_API sl_status sl_config_manifold(const sl_config* c, sl_manifold** out);

/* budget <= 0 uses the manifold default. verdict_json and trajectory_csv may be NULL. */
SL_API sl_status sl_scatter(const sl_manifold* m, const sl_boundary_vector* entry, double budget, int method,
                            sl_lens_record* out, char** verdict_json, char** trajectory_csv);

SL_API sl_status sl_lens_table_compute(const sl_manifold* m, const sl_sampling* sampling,
                                       const sl_lens_options* options, sl_lens_table** out);
SL_API sl_status sl_lens_table_load(const char* csv_path, const char* sidecar_path, sl_lens_table** out);
SL_API sl_status sl_lens_table_save(const sl_lens_table* t, const char* csv_path, const char* sidecar_path);
SL_API void sl_lens_table_free(sl_lens_table* t);
SL_API size_t sl_lens_table_size(const sl_lens_table* t);
SL_API sl_status sl_lens_table_record(const sl_lens_table* t, size_t index, sl_lens_record* out);
SL_API sl_status sl_lens_table_csv(const sl_lens_table* t, char** out);
SL_API sl_status sl_lens_table_sidecar(const sl_lens_table* t, char** out);
/* Sidecar fields plus a "records" array. */
SL_API sl_status sl_lens_table_json(const sl_lens_table* t, char** out);

/* Aggregate JSON and per-record CSV (either may be NULL); max_deviation may be NULL. */
SL_API sl_status sl_compare(const sl_lens_table* a, const sl_lens_table* b, char** json, char** csv,
                            double* max_deviation);

SL_API sl_status sl_clairaut_family_scan(const sl_bump_profile* base, const double* shifts, size_t shift_count,
                                         const double* angles, size_t angle_count, int entry_end, int workers,
                                         char** csv, char** json, double* max_deviation);
/* count open entry angles in (-pi/2, pi/2). */
SL_API sl_status sl_open_angle_grid(int count, double* out);

SL_API sl_status sl_santalo_volume(const sl_manifold* m, uint64_t samples, uint64_t seed, double budget,
                                   int workers, sl_santalo_estimate* out, char** json);
SL_API sl_status sl_trapped_ladder(const sl_manifold* m, const double* budgets, size_t count, uint64_t samples,
                                   uint64_t seed, int workers, sl_trapped_rung* out, char** json, char** csv);

/* Universal-cover Busemann approximation f_t(p) = d(p, gamma_V(t)) - t. Points and vectors are
   chart coordinates of length n + 1. gradient_norm may be NULL; h is its difference step. */
SL_API sl_status sl_busemann(const sl_manifold* m, const double* base, const double* direction, double t,
                             const double* point, double h, double* value, double* gradient_norm);

/* criteria == NULL runs all of them. report_json and summary may be NULL. */
SL_API sl_status sl_selftest(const int* criteria, size_t count, uint64_t seed, int workers, sl_progress_fn progress,
                             void* user, int* all_passed, char** report_json, char** summary);

#ifdef __cplusplus
}
#endif

#endif
