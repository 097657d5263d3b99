/* C API for the two-way relay training-design toolkit.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Functions return TWR_OK (0) on success; on failure they return an error
 * code and leave a thread-local message retrievable via twr_last_error().
 */

#ifndef TWR_H
#define TWR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum twr_status {
  TWR_OK = 0,
  TWR_ERR_CONFIG = 2,   /* config file missing/invalid */
  TWR_ERR_NUMERIC = 3,  /* numerical failure in a solver or design */
  TWR_ERR_ARG = 4,      /* bad argument (null handle, unknown name, ...) */
  TWR_ERR_IO = 5        /* file I/O failure */
} twr_status;

typedef struct twr_experiment twr_experiment; /* parsed experiment config */
typedef struct twr_results twr_results;       /* result table of a sweep */
typedef struct twr_report twr_report;         /* one design report */

const char* twr_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* twr_last_error(void);

/* --- experiment configs ------------------------------------------------ */

twr_status twr_experiment_load(const char* path, twr_experiment** out);
twr_status twr_experiment_parse(const char* text, twr_experiment** out);
void twr_experiment_free(twr_experiment* exp);

twr_status twr_experiment_set_seed(twr_experiment* exp, uint64_t seed);
twr_status twr_experiment_set_trials(twr_experiment* exp, int trials);

/* --- sweeps ------------------------------------------------------------- */

twr_status twr_experiment_run(const twr_experiment* exp, twr_results** out);

typedef struct twr_result_row {
  const char* method; /* owned by the results object */
  double snr_db;
  double analytic_nmse;
  double empirical_nmse;
  int iterations;
  double wall_time;
  uint64_t seed;
} twr_result_row;

int twr_results_count(const twr_results* res);
twr_status twr_results_row(const twr_results* res, int index, twr_result_row* out);
/* format: "csv" or "json" */
twr_status twr_results_write(const twr_results* res, const char* format,
                             const char* path);
void twr_results_free(twr_results* res);

/* --- single designs ----------------------------------------------------- */

/* method: alternating | kkt-closed-form | waterfilling | convex-psd |
 *         svd-mixed | svd-white | convex-qr | identity | p2p-orthogonal
 * (phase comes from the experiment config) */
twr_status twr_design_run(const twr_experiment* exp, const char* method,
                          double snr_db, twr_report** out);

double twr_report_mse(const twr_report* rep);
double twr_report_nmse(const twr_report* rep);
int twr_report_iterations(const twr_report* rep);
double twr_report_kkt_residual(const twr_report* rep);
int twr_report_trace_len(const twr_report* rep);
double twr_report_trace_at(const twr_report* rep, int index);
twr_status twr_report_write_convergence(const twr_report* rep, const char* path);

/* Designed sequence access: dimensions, then a bulk copy of the entries in
 * column-major order into caller-provided arrays of length rows*cols. */
twr_status twr_report_sequence_dims(const twr_report* rep, int* rows, int* cols);
twr_status twr_report_sequence(const twr_report* rep, double* re, double* im);

void twr_report_free(twr_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* TWR_H */
