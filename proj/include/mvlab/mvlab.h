#ifndef MVLAB_MVLAB_H
#define MVLAB_MVLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MVLAB_BUILDING_LIBRARY)
#define MVLAB_API __declspec(dllexport)
#else
#define MVLAB_API __declspec(dllimport)
#endif
#else
#define MVLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum mvlab_status {
  MVLAB_OK = 0,
  MVLAB_ERR_INTERNAL = 1,
  MVLAB_ERR_VALIDATION = 2,
  MVLAB_ERR_NUMERICAL = 3,
  MVLAB_ERR_VERIFICATION = 4
} mvlab_status;

typedef struct mvlab_config mvlab_config;
typedef struct mvlab_run mvlab_run;

MVLAB_API const char* mvlab_version(void);

/* Message of the last failed call on this thread ("" if none). */
MVLAB_API const char* mvlab_last_error(void);

/* Configuration. Every constructor applies MVLAB_* environment overrides. */
MVLAB_API mvlab_status mvlab_config_load(const char* path, mvlab_config** out);
MVLAB_API mvlab_status mvlab_config_parse(const char* json_text, mvlab_config** out);
MVLAB_API mvlab_status mvlab_config_canonical(mvlab_config** out);
MVLAB_API mvlab_status mvlab_config_set_seed(mvlab_config* cfg, uint64_t seed);
MVLAB_API mvlab_status mvlab_config_set_threads(mvlab_config* cfg, int threads);
/* Writes the 16-digit config hash plus terminator; buf must hold 17 bytes. */
MVLAB_API mvlab_status mvlab_config_hash(const mvlab_config* cfg, char* buf, size_t len);
/* Output directory named in the config; valid until the handle is freed. */
MVLAB_API const char* mvlab_config_output_dir(const mvlab_config* cfg);
MVLAB_API void mvlab_config_free(mvlab_config* cfg);

/* Commands. On success or verification failure *run receives a handle with
   the log; on other errors *run is NULL and mvlab_last_error explains. */
MVLAB_API mvlab_status mvlab_simulate(const mvlab_config* cfg, const char* out_dir, mvlab_run** run);
MVLAB_API mvlab_status mvlab_skeleton(const mvlab_config* cfg, const char* out_dir, const char* control_path,
                                      mvlab_run** run);
MVLAB_API mvlab_status mvlab_rate(const mvlab_config* cfg, const char* out_dir, const char* target, mvlab_run** run);
MVLAB_API mvlab_status mvlab_verify(const mvlab_config* cfg, const char* out_dir, const char* suite,
                                    mvlab_run** run);

MVLAB_API size_t mvlab_run_message_count(const mvlab_run* run);
MVLAB_API const char* mvlab_run_message(const mvlab_run* run, size_t index);
MVLAB_API size_t mvlab_run_warning_count(const mvlab_run* run);
MVLAB_API const char* mvlab_run_warning(const mvlab_run* run, size_t index);
MVLAB_API void mvlab_run_free(mvlab_run* run);

/* Stateless numerics on the periodic grid [-L, L)^dim with M points per axis.
   Arrays are row-major with M^dim entries. */
MVLAB_API mvlab_status mvlab_fractional_laplacian(int dim, double half_width, int points, double alpha,
                                                  const double* in, double* out);
MVLAB_API mvlab_status mvlab_semigroup_resolvent(int dim, double half_width, int points, double alpha, double tau,
                                                 const double* in, double* out);
/* W2 between two uniform empirical measures of n fields each; particles are
   stored consecutively. */
MVLAB_API mvlab_status mvlab_wasserstein2(int dim, double half_width, int points, size_t n, const double* mu,
                                          const double* nu, double* out);

#ifdef __cplusplus
}
#endif

#endif
