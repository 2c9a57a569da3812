#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "floq/floq.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  floq_chain chain = floq_chain_default();
  chain.L = 60;
  floq_step_drive drive = {0.0, 1.5, 0.1 * M_PI, 0.25 * M_PI};

  EXPECT(strlen(floq_version()) > 0);
  EXPECT(floq_exit_code(FLOQ_OK) == 0);
  EXPECT(floq_exit_code(FLOQ_ERR_VALIDATION) == 2);
  EXPECT(floq_exit_code(FLOQ_ERR_NOT_CONVERGED) == 3);
  EXPECT(floq_exit_code(FLOQ_ERR_IO) == 4);

  floq_trajectory* v = NULL;
  floq_trajectory* l = NULL;
  EXPECT(floq_volterra(&chain, &drive, 5.0, 0.0, 1, &v) == FLOQ_OK);
  EXPECT(floq_lattice(&chain, &drive, 5.0, 50, &l) == FLOQ_OK);
  EXPECT(floq_trajectory_frame(v) == FLOQ_FRAME_C0_PRIME);
  size_t nl = floq_trajectory_size(l);
  EXPECT(nl == 319);
  double* pl = malloc(nl * sizeof(double));
  double* tl = malloc(nl * sizeof(double));
  double* fl = malloc(nl * sizeof(double));
  double* fd = malloc(nl * sizeof(double));
  EXPECT(floq_trajectory_data(l, tl, NULL, NULL, pl, nl) == nl);
  EXPECT(fabs(pl[0] - 1.0) < 1e-12);
  floq_state st = floq_state_default();
  EXPECT(floq_fidelity(l, &st, fl, nl) == FLOQ_OK);
  EXPECT(floq_fidelity_direct(&chain, &drive, &st, tl, nl, fd) == FLOQ_OK);
  double worst = 0.0;
  for (size_t i = 0; i < nl; ++i) worst = fmax(worst, fabs(fl[i] - fd[i]));
  EXPECT(worst < 1e-10);
  EXPECT(floq_fidelity(l, &st, fl, 3) == FLOQ_ERR_VALIDATION);
  free(pl);
  free(tl);
  free(fl);
  free(fd);
  floq_trajectory_free(v);
  floq_trajectory_free(l);

  floq_step_drive bad = {0.0, 1.0, 2.0, 1.0};
  floq_trajectory* none = NULL;
  EXPECT(floq_lattice(&chain, &bad, 5.0, 50, &none) == FLOQ_ERR_VALIDATION);
  EXPECT(none == NULL);
  EXPECT(strstr(floq_last_error(), "tau") != NULL);
  EXPECT(strstr(floq_last_error_json(), "\"code\":2") != NULL);

  floq_spectrum* m = NULL;
  floq_spectrum* s = NULL;
  floq_tolerances tol = floq_tolerances_default();
  floq_step_drive fbs = {0.0, 3.2, 0.1 * M_PI, 0.25 * M_PI};
  EXPECT(floq_monodromy(&chain, &fbs, &tol, &m) == FLOQ_OK);
  EXPECT(floq_sambe(&chain, &fbs, &tol, 0, 0, 0.0, &s) == FLOQ_OK);
  EXPECT(floq_spectrum_size(m) == 61);
  EXPECT(floq_spectrum_size(s) == 61);
  EXPECT(floq_spectrum_distance(m, s) < 1e-8);
  EXPECT(floq_spectrum_bound_count(m) == 1);
  floq_spectrum_entry e;
  EXPECT(floq_spectrum_entry_at(m, 0, &e) == FLOQ_OK);
  EXPECT(floq_spectrum_entry_at(m, 1000, &e) == FLOQ_ERR_VALIDATION);
  int found = 0;
  double mean = 0.0, lo = 0.0, hi = 0.0;
  EXPECT(floq_fbs_p_infinity(m, 64, &found, &mean, &lo, &hi) == FLOQ_OK);
  EXPECT(found == 1 && mean > 0.3 && lo <= mean && mean <= hi);
  double prof[61];
  EXPECT(floq_fbs_profile(m, 0.25 * fbs.period, prof, 61) == FLOQ_OK);
  double total = 0.0;
  for (int j = 0; j < 61; ++j) total += prof[j];
  EXPECT(fabs(total - 1.0) < 1e-10);
  EXPECT(floq_fbs_profile(s, 0.0, prof, 61) == FLOQ_ERR_VALIDATION);
  floq_spectrum_free(m);
  floq_spectrum_free(s);

  floq_step_drive weak = {0.0, 1.5, 0.1 * M_PI, 0.25 * M_PI};
  EXPECT(floq_monodromy(&chain, &weak, &tol, &m) == FLOQ_OK);
  EXPECT(floq_fbs_profile(m, 0.0, prof, 61) == FLOQ_ERR_NOT_BOUND);
  floq_spectrum_free(m);

  double re = 0.0, im = 0.0;
  floq_step_drive cdt = {-10.0, 10.0, 0.2 * M_PI, 0.4 * M_PI};
  EXPECT(floq_renorm_factor(&cdt, 0, &re, &im) == FLOQ_OK);
  EXPECT(hypot(re, im) < 1e-12);
  double roots[8], res[8];
  size_t count = 0;
  EXPECT(floq_find_f0_zeros(0.4 * M_PI, 0.2 * M_PI, 5.0, 35.0, roots, res, 8, &count) == FLOQ_OK);
  EXPECT(count == 3);
  EXPECT(fabs(roots[0] - 10.0) < 1e-6 && fabs(roots[1] - 20.0) < 1e-6 && fabs(roots[2] - 30.0) < 1e-6);
  EXPECT(floq_find_f0_zeros(0.4 * M_PI, 0.2 * M_PI, 1.0, 9.0, roots, res, 8, &count) == FLOQ_OK);
  EXPECT(count == 0);
  double times[2] = {10.0, 20.0}, filt[2];
  EXPECT(floq_filtered_population(&chain, &fbs, times, 2, filt) == FLOQ_OK);
  EXPECT(filt[1] < filt[0] && filt[0] < 1.0);

  floq_config* cfg = NULL;
  EXPECT(floq_config_preset("fig2", &cfg) == FLOQ_OK);
  EXPECT(strcmp(floq_config_get(cfg, "drive.a2"), "36") == 0);
  EXPECT(floq_config_set(cfg, "drive.tau", "0.03pi") == FLOQ_OK);
  EXPECT(floq_config_set(cfg, "chain.bogus", "1") == FLOQ_ERR_VALIDATION);
  EXPECT(floq_config_get(cfg, "chain.bogus") == NULL);
  floq_config* again = NULL;
  EXPECT(floq_config_parse(floq_config_serialize(cfg), &again) == FLOQ_OK);
  EXPECT(strcmp(floq_config_serialize(again), floq_config_serialize(cfg)) == 0);
  EXPECT(floq_config_set(again, "drive.tau", "1") == FLOQ_OK);
  EXPECT(floq_config_validate(again) == FLOQ_ERR_VALIDATION);
  EXPECT(floq_run_command(again, "dynamics", NULL, NULL) == FLOQ_ERR_VALIDATION);
  EXPECT(floq_run_command(cfg, "dynamics", "{not json", NULL) == FLOQ_ERR_VALIDATION);
  floq_config_free(again);
  floq_config_free(cfg);
  floq_config* missing = NULL;
  EXPECT(floq_config_load("/nonexistent/plan.ini", &missing) == FLOQ_ERR_IO);

  if (failures == 0) printf("c api: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
