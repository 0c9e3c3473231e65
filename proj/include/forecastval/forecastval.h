#ifndef FORECASTVAL_H
#define FORECASTVAL_H

/* C interface to the forecast-verification core. Panels are opaque handles;
 * every call reports failure through a status code and a message buffer.
 * Results are JSON documents (malloc'd strings, released with
 * fv_string_free); option arguments are JSON documents as well, documented
 * per command in the README. Numbers in results are printed with 17
 * significant digits so equal inputs give byte-identical output. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fv_status {
    FV_OK = 0,
    FV_ERR_VALIDATION = 1,  /* malformed file, value out of range, bad option */
    FV_ERR_PRECONDITION = 2 /* valid data that an estimator cannot use */
} fv_status;

typedef struct fv_panel fv_panel;

const char* fv_version(void);

/* column_map_json: optional renaming {"canonical": "csv header", ...} or NULL.
 * general_mode: 0 for binary 0/1 outcomes, nonzero for real-valued outcomes. */
fv_status fv_panel_load_csv(const char* path, const char* column_map_json,
                            int general_mode, fv_panel** out, char* errbuf,
                            size_t errbuf_size);
void fv_panel_free(fv_panel* panel);

/* -1 on a NULL handle. */
long long fv_panel_size(const fv_panel* panel);
int fv_panel_periods(const fv_panel* panel);

/* Average score of a forecast column with a confidence interval.
 * Options: {"loss","clip_epsilon","alpha","variance","by","bins","field"} */
fv_status fv_score(const fv_panel* panel, const char* options_json,
                   char** json_out, char* errbuf, size_t errbuf_size);

/* Difference of the average scores of p_hat and p_hat_alt. On a general-mode
 * panel this runs the general-predictand comparison, which requires buckets.
 * Options: {"loss","clip_epsilon","alpha","variance","by","bins","mode"} */
fv_status fv_compare(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size);

/* Winkler's climatology-weighted score with a confidence interval.
 * Options: {"loss","clip_epsilon","alpha","variance","by","bins","degenerate"} */
fv_status fv_winkler(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size);

/* Percentage improvement over climatology; point value only.
 * Options: {"loss","clip_epsilon"} */
fv_status fv_skill(const fv_panel* panel, const char* options_json,
                   char** json_out, char* errbuf, size_t errbuf_size);

/* Per-cell bucket statistics, optionally with the adjusted Brier report.
 * Options: {"by","bins","adjusted_brier","alpha"} */
fv_status fv_buckets(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size);

/* Reliability diagram with quasi-bucket intervals. csv_out (nullable)
 * receives plot-ready rows bin_mid,y_bar,ci_lo,ci_hi,naive_lo,naive_hi,n_j.
 * Options: {"bins","alpha","naive"} */
fv_status fv_reliability(const fv_panel* panel, const char* options_json,
                         char** json_out, char** csv_out, char* errbuf,
                         size_t errbuf_size);

/* Scenario studies; no panel needed. csv_out (nullable) is filled for emits
 * with plot-ready data ("qq" points, "panel" rows).
 * Options: {"scenario","runs","seed","emit","run"} with emit one of
 * "table2","table3","qq","coverage","panel". */
fv_status fv_simulate(const char* options_json, char** json_out, char** csv_out,
                      char* errbuf, size_t errbuf_size);

/* Exact enumeration checks for auditors.
 * Options: {"check","p","m"} with check one of "a2","a7","a8","eq513". */
fv_status fv_verify(const char* options_json, char** json_out, char* errbuf,
                    size_t errbuf_size);

void fv_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
