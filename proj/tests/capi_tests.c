#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mvlab/mvlab.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static void test_config_handles(void) {
  mvlab_config* cfg = NULL;
  char a[17], b[17], small[8];
  EXPECT(mvlab_config_canonical(&cfg) == MVLAB_OK);
  EXPECT(mvlab_config_hash(cfg, a, sizeof a) == MVLAB_OK);
  EXPECT(strlen(a) == 16);
  EXPECT(mvlab_config_hash(cfg, small, sizeof small) == MVLAB_ERR_VALIDATION);
  EXPECT(mvlab_config_set_threads(cfg, 3) == MVLAB_OK);
  EXPECT(mvlab_config_hash(cfg, b, sizeof b) == MVLAB_OK);
  EXPECT(strcmp(a, b) == 0);
  EXPECT(mvlab_config_set_seed(cfg, 12345) == MVLAB_OK);
  EXPECT(mvlab_config_hash(cfg, b, sizeof b) == MVLAB_OK);
  EXPECT(strcmp(a, b) != 0);
  EXPECT(mvlab_config_set_threads(cfg, -1) == MVLAB_ERR_VALIDATION);
  EXPECT(strlen(mvlab_config_output_dir(cfg)) > 0);
  mvlab_config_free(cfg);
  mvlab_config_free(NULL);
}

static void test_config_errors(void) {
  mvlab_config* cfg = NULL;
  EXPECT(mvlab_config_parse("{\"grid\": {\"points\": 127}}", &cfg) == MVLAB_ERR_VALIDATION);
  EXPECT(cfg == NULL);
  EXPECT(strstr(mvlab_last_error(), "grid.points") != NULL);
  EXPECT(mvlab_config_parse("{\"bogus\": 1}", &cfg) == MVLAB_ERR_VALIDATION);
  EXPECT(mvlab_config_load("/nonexistent/mvlab.json", &cfg) == MVLAB_ERR_VALIDATION);
  EXPECT(mvlab_config_parse(NULL, &cfg) == MVLAB_ERR_VALIDATION);
  EXPECT(mvlab_config_parse("{}", NULL) == MVLAB_ERR_VALIDATION);
}

static void test_fractional_laplacian(void) {
  enum { M = 64 };
  const double L = 4.0, alpha = 0.6, pi = 3.14159265358979323846;
  double in[M], out[M], res[M];
  const double xi = pi * 3.0 / L;
  for (int j = 0; j < M; ++j) in[j] = sin(xi * (-L + j * 2.0 * L / M));
  EXPECT(mvlab_fractional_laplacian(1, L, M, alpha, in, out) == MVLAB_OK);
  EXPECT(mvlab_semigroup_resolvent(1, L, M, alpha, 0.5, in, res) == MVLAB_OK);
  for (int j = 0; j < M; ++j) {
    EXPECT(fabs(out[j] - pow(xi * xi, alpha) * in[j]) < 1e-11);
    EXPECT(fabs(res[j] - in[j] / (1.0 + 0.5 * pow(xi * xi, alpha))) < 1e-12);
  }
  EXPECT(mvlab_fractional_laplacian(1, L, M, 1.0, in, out) == MVLAB_ERR_VALIDATION);
  EXPECT(mvlab_fractional_laplacian(1, L, M - 1, alpha, in, out) == MVLAB_ERR_VALIDATION);
}

static void test_wasserstein(void) {
  enum { M = 8 };
  double mu[2 * M], nu[2 * M], w = -1.0;
  for (int j = 0; j < M; ++j) {
    mu[j] = 0.0;
    mu[M + j] = 1.0;
    nu[j] = 1.0; /* nu is mu with particles swapped */
    nu[M + j] = 0.0;
  }
  EXPECT(mvlab_wasserstein2(1, 2.0, M, 2, mu, nu, &w) == MVLAB_OK);
  EXPECT(fabs(w) < 1e-14);
  for (int j = 0; j < M; ++j) nu[j] = 3.0;
  EXPECT(mvlab_wasserstein2(1, 2.0, M, 2, mu, nu, &w) == MVLAB_OK);
  /* optimal pairing (0 -> 0) and (1 -> 3) costs 4 * |domain| on one particle */
  EXPECT(fabs(w - sqrt(0.5 * 4.0 * 4.0)) < 1e-12);
  EXPECT(mvlab_wasserstein2(1, 2.0, M, 0, mu, nu, &w) == MVLAB_ERR_VALIDATION);
}

static void test_verify_run(const char* dir) {
  mvlab_config* cfg = NULL;
  mvlab_run* run = NULL;
  EXPECT(mvlab_config_canonical(&cfg) == MVLAB_OK);
  EXPECT(mvlab_verify(cfg, dir, "spectral", &run) == MVLAB_OK);
  EXPECT(run != NULL);
  EXPECT(mvlab_run_message_count(run) > 0);
  EXPECT(mvlab_run_message(run, 0) != NULL);
  EXPECT(mvlab_run_message(run, 100000) == NULL);
  mvlab_run_free(run);
  run = NULL;
  EXPECT(mvlab_verify(cfg, dir, "nonsense", &run) == MVLAB_ERR_VALIDATION);
  EXPECT(run == NULL);
  EXPECT(mvlab_rate(cfg, dir, "nowhere", &run) == MVLAB_ERR_VALIDATION);
  mvlab_config_free(cfg);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_tests_out";
  EXPECT(strlen(mvlab_version()) > 0);
  test_config_handles();
  test_config_errors();
  test_fractional_laplacian();
  test_wasserstein();
  test_verify_run(dir);
  if (failures) fprintf(stderr, "%d expectation(s) failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
