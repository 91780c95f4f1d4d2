#ifndef HANDOVER_HANDOVER_H
#define HANDOVER_HANDOVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HANDOVER_BUILDING_DLL)
#define HO_API __declspec(dllexport)
#else
#define HO_API __declspec(dllimport)
#endif
#else
#define HO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. CONFIG, DIVERGENCE and ORACLE equal the CLI exit codes. */
typedef enum ho_status {
  HO_OK = 0,
  HO_ERR_INVALID_ARGUMENT = 1,
  HO_ERR_CONFIG = 2,
  HO_ERR_DIVERGENCE = 3,
  HO_ERR_ORACLE_DISAGREEMENT = 4,
  HO_ERR_NUMERIC = 5,
  HO_ERR_IO = 6,
  HO_ERR_INTERNAL = 9
} ho_status;

typedef struct ho_window ho_window;
typedef struct ho_episode ho_episode;
typedef struct ho_suite ho_suite;
typedef struct ho_oracle_report ho_oracle_report;

HO_API const char* ho_version(void);

/* Message for the last failing call on this thread; never NULL. */
HO_API const char* ho_last_error(void);

/* Frees strings returned through char** out-parameters. */
HO_API void ho_string_free(char* s);

/* ---- contact model window ------------------------------------------- */

/* prior_json may be NULL for the defaults; otherwise an object with
   optional "mean", "cov" and "noise_variance". */
HO_API ho_status ho_window_create(const char* prior_json, size_t capacity,
                                  size_t recompute_interval, ho_window** out);
HO_API void ho_window_destroy(ho_window* w);
HO_API ho_status ho_window_push(ho_window* w, double u, double f, double t);
HO_API ho_status ho_window_size(const ho_window* w, size_t* out);
/* mean[2]; cov[4] row-major. */
HO_API ho_status ho_window_posterior(const ho_window* w, double* mean,
                                     double* cov);
/* Posterior of the prior updated with n samples in one batch. */
HO_API ho_status ho_batch_posterior(const char* prior_json, const double* u,
                                    const double* f, size_t n, double* mean,
                                    double* cov);

/* ---- firmness ------------------------------------------------------- */

HO_API ho_status ho_firmness_check(const double* mean, const double* cov,
                                   double confidence, double v_max,
                                   double object_weight, int* firm);

/* ---- episodes ------------------------------------------------------- */

typedef struct ho_episode_options {
  int override_seed; /* nonzero: use seed below instead of the config's */
  uint64_t seed;
  int record_trace;
} ho_episode_options;

/* Runs one episode from a JSON config (NULL: all defaults). options may be
   NULL. */
HO_API ho_status ho_episode_run(const char* config_json,
                                const ho_episode_options* options,
                                ho_episode** out);
HO_API void ho_episode_destroy(ho_episode* e);
/* Episode label, e.g. "SUCCESS". The pointer lives as long as e. */
HO_API const char* ho_episode_label(const ho_episode* e);
/* One-line JSON summary. */
HO_API ho_status ho_episode_summary_json(const ho_episode* e, char** out);
HO_API ho_status ho_episode_write_trace(const ho_episode* e, const char* path);
HO_API ho_status ho_episode_write_fit(const ho_episode* e, const char* path,
                                      int grid_points);
/* Full-width 95% predictive band at u = +v_max and -v_max for the model at
   the final sample, or at time t (seconds) when the trace was recorded and
   t >= 0. */
HO_API ho_status ho_episode_band_widths(const ho_episode* e, double t,
                                        double* width_up, double* width_down);

/* ---- suites --------------------------------------------------------- */

typedef struct ho_suite_options {
  int override_seed;
  uint64_t seed;
  int jobs; /* 0 keeps the config value */
} ho_suite_options;

/* suite_json may be NULL or "{}" for the default matrix. */
HO_API ho_status ho_suite_run(const char* suite_json,
                              const ho_suite_options* options, ho_suite** out);
HO_API void ho_suite_destroy(ho_suite* s);
/* Writes episodes.csv, summary.csv, summary.json and episodes.jsonl. */
HO_API ho_status ho_suite_write(const ho_suite* s, const char* dir);
HO_API ho_status ho_suite_summary_text(const ho_suite* s, char** out);
HO_API ho_status ho_suite_wall_seconds(const ho_suite* s, double* out);

/* ---- oracle check --------------------------------------------------- */

typedef struct ho_oracle_options {
  uint64_t seed;
  int instances;
  int sequences;
  int sequence_length;
  int inject_fault;
} ho_oracle_options;

/* Fills the defaults (seed 1, 1000 instances, 100 x 1000 sequences). */
HO_API void ho_oracle_options_default(ho_oracle_options* o);

/* Returns HO_OK when the run completed, whatever the verdict; query it with
   ho_oracle_report_passed. */
HO_API ho_status ho_oracle_check(const ho_oracle_options* options,
                                 ho_oracle_report** out);
/* Re-evaluates serialized instances from a JSON file. */
HO_API ho_status ho_oracle_replay(const char* path,
                                  const ho_oracle_options* options,
                                  ho_oracle_report** out);
HO_API void ho_oracle_report_destroy(ho_oracle_report* r);
HO_API ho_status ho_oracle_report_passed(const ho_oracle_report* r,
                                         int* passed);
HO_API ho_status ho_oracle_report_text(const ho_oracle_report* r, char** out);
/* Writes oracle_report.json; failing instances are included for replay. */
HO_API ho_status ho_oracle_report_write(const ho_oracle_report* r,
                                        const char* dir);

#ifdef __cplusplus
}
#endif

#endif
