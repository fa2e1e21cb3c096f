#ifndef FRIT_FRIT_H
#define FRIT_FRIT_H

/* C interface to the frit library. Every object is an opaque handle owned by
 * the caller and released with its *_free function. Functions that can fail
 * return a frit_status; on failure frit_last_error() describes the problem
 * (thread-local, valid until the next failing call on the same thread).
 * Pointers returned by getters stay valid while their handle is alive. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FRIT_BUILDING)
#    define FRIT_API __declspec(dllexport)
#  else
#    define FRIT_API __declspec(dllimport)
#  endif
#else
#  define FRIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum frit_status {
  FRIT_OK = 0,
  FRIT_E_INVALID_ARGUMENT = 1,
  FRIT_E_IMPROPER = 2,
  FRIT_E_SAMPLE_TIME_MISMATCH = 3,
  FRIT_E_ALGEBRAIC_LOOP = 4,
  FRIT_E_NON_INVERTIBLE = 5,
  FRIT_E_FICTITIOUS_HEAD_ZERO = 6,
  FRIT_E_ASSUMPTION = 7,
  FRIT_E_DATA_MALFORMED = 8,
  FRIT_E_NUMERICAL = 9,
  FRIT_E_UNKNOWN_NAME = 10,
  FRIT_E_IO = 11,
  FRIT_E_BUFFER_TOO_SMALL = 12,
  FRIT_E_INTERNAL = 99
} frit_status;

FRIT_API const char* frit_last_error(void);
FRIT_API const char* frit_status_string(frit_status status);

/* ---- transfer functions ---- */

typedef struct frit_tf frit_tf;

/* Coefficients are highest power first. */
FRIT_API frit_status frit_tf_continuous(const double* num, size_t num_len, const double* den, size_t den_len,
                                        double dead_time, frit_tf** out);
/* num/den in powers of z; the extra z^-delay factor is kept separately. */
FRIT_API frit_status frit_tf_discrete(const double* num, size_t num_len, const double* den, size_t den_len,
                                      double sample_time, size_t delay, frit_tf** out);
FRIT_API frit_status frit_tf_tustin(const frit_tf* continuous, double sample_time, frit_tf** out);
FRIT_API void frit_tf_free(frit_tf* tf);

FRIT_API int frit_tf_is_discrete(const frit_tf* tf);
/* 0 for continuous models. */
FRIT_API double frit_tf_sample_time(const frit_tf* tf);
/* Delay in samples (discrete) or seconds (continuous). */
FRIT_API double frit_tf_delay(const frit_tf* tf);
FRIT_API const double* frit_tf_num(const frit_tf* tf, size_t* len);
FRIT_API const double* frit_tf_den(const frit_tf* tf, size_t* len);
/* Pass NULL buffers to query the count. */
FRIT_API frit_status frit_tf_poles(const frit_tf* tf, double* re, double* im, size_t capacity, size_t* count);
/* y has room for n samples. */
FRIT_API frit_status frit_tf_simulate(const frit_tf* tf, const double* u, size_t n, double* y);

/* ---- controllers ---- */

typedef enum frit_controller_kind { FRIT_FOPID = 0, FRIT_IOPID = 1 } frit_controller_kind;

typedef struct frit_controller_spec {
  frit_controller_kind kind;
  int oustaloup_order;
  double w_b;
  double w_h;
  double sample_time;
} frit_controller_spec;

FRIT_API void frit_controller_spec_default(frit_controller_spec* spec, frit_controller_kind kind,
                                           double sample_time);
/* 5 for FOPID [kp ki lambda kd mu], 3 for IOPID [kp ki kd]. */
FRIT_API size_t frit_controller_dimension(frit_controller_kind kind);
FRIT_API frit_status frit_controller_realize(const frit_controller_spec* spec, const double* theta, size_t n,
                                             frit_tf** out);

/* ---- experiment records ---- */

typedef struct frit_record frit_record;

typedef enum frit_signal_id { FRIT_SIGNAL_R0 = 0, FRIT_SIGNAL_U0 = 1, FRIT_SIGNAL_Y0 = 2 } frit_signal_id;

/* Lengths are checked by the library (FRIT_E_DATA_MALFORMED on mismatch);
 * r0[0] == 0 gives FRIT_E_ASSUMPTION. */
FRIT_API frit_status frit_record_create(const double* r0, size_t r0_len, const double* u0, size_t u0_len,
                                        const double* y0, size_t y0_len, double sample_time, frit_record** out);
FRIT_API void frit_record_free(frit_record* record);
FRIT_API size_t frit_record_size(const frit_record* record);
FRIT_API double frit_record_sample_time(const frit_record* record);
FRIT_API const double* frit_record_signal(const frit_record* record, frit_signal_id which);

/* ---- loss ---- */

typedef enum frit_penalty_reason {
  FRIT_PENALTY_NONE = 0,
  FRIT_PENALTY_NON_INVERTIBLE = 1,
  FRIT_PENALTY_FICTITIOUS_HEAD_ZERO = 2,
  FRIT_PENALTY_NONFINITE = 3
} frit_penalty_reason;

FRIT_API const char* frit_penalty_reason_string(frit_penalty_reason reason);

typedef struct frit_loss {
  double j;
  double epsilon_l1; /* NaN when penalized early */
  double t_l1;
  int penalized;
  frit_penalty_reason penalty_reason;
} frit_loss;

typedef struct frit_bound {
  int valid; /* 0 when the evaluation was penalized */
  double gamma_r0;
  double bound;
  double t_l1;
  int satisfied;
  double inverse_l1;
  double induced_bound;
  int induced_satisfied;
} frit_bound;

/* bound may be NULL. */
FRIT_API frit_status frit_evaluate_loss(const frit_record* data, const frit_tf* reference_model,
                                        const frit_controller_spec* spec, const double* theta, size_t n,
                                        frit_loss* loss, frit_bound* bound);

/* ---- tuning ---- */

typedef struct frit_pso_config {
  size_t swarm_size;
  size_t max_iterations;
  double inertia_min;
  double inertia_max;
  double cognitive_coeff;
  double social_coeff;
  size_t stall_iterations;
  double tolerance;
  unsigned workers;
} frit_pso_config;

FRIT_API void frit_pso_config_default(frit_pso_config* cfg);

typedef struct frit_tuning frit_tuning;

typedef struct frit_tuning_stats {
  uint64_t seed;
  size_t iterations;
  size_t evaluations;
  size_t nonpenalized_evaluations;
  size_t penalized_evaluations;
  size_t bound_violations;
  size_t induced_bound_violations;
  double worst_bound_ratio;
} frit_tuning_stats;

/* Runs the search once per seed and keeps the lowest J (earliest seed on
 * ties). theta0, lower and upper all have n entries. */
FRIT_API frit_status frit_tune(const frit_record* data, const frit_tf* reference_model,
                               const frit_controller_spec* spec, const double* theta0, const double* lower,
                               const double* upper, size_t n, const frit_pso_config* cfg, const uint64_t* seeds,
                               size_t seed_count, frit_tuning** out);
FRIT_API void frit_tuning_free(frit_tuning* tuning);

FRIT_API const double* frit_tuning_theta_star(const frit_tuning* tuning, size_t* n);
FRIT_API double frit_tuning_j0(const frit_tuning* tuning);
FRIT_API double frit_tuning_j_star(const frit_tuning* tuning);
FRIT_API void frit_tuning_loss(const frit_tuning* tuning, frit_loss* loss);
FRIT_API void frit_tuning_bound(const frit_tuning* tuning, frit_bound* bound);
/* Best value after each iteration of the winning run; entry 0 is the initial swarm. */
FRIT_API const double* frit_tuning_trace(const frit_tuning* tuning, size_t* len);
/* Stats of the winning run. */
FRIT_API void frit_tuning_stats_get(const frit_tuning* tuning, frit_tuning_stats* stats);
/* Per-seed runs, in the order the seeds were given. */
FRIT_API size_t frit_tuning_run_count(const frit_tuning* tuning);
FRIT_API frit_status frit_tuning_run(const frit_tuning* tuning, size_t index, frit_tuning_stats* stats,
                                     double* j_star);

/* ---- validation against a plant ---- */

typedef struct frit_validation frit_validation;

typedef enum frit_trace_id {
  FRIT_TRACE_R = 0,
  FRIT_TRACE_Y_MODEL = 1,
  FRIT_TRACE_Y_CLOSED_LOOP = 2,
  FRIT_TRACE_U = 3
} frit_trace_id;

typedef struct frit_validation_summary {
  int stable;
  double max_pole_magnitude;
  double tracking_error_l1;
  double max_abs_input;
  double input_l1;
  size_t pole_count;
  size_t length;
} frit_validation_summary;

FRIT_API frit_status frit_validate(const frit_tf* plant, const frit_tf* reference_model,
                                   const frit_controller_spec* spec, const double* theta, size_t n, const double* r,
                                   size_t r_len, frit_validation** out);
FRIT_API void frit_validation_free(frit_validation* validation);
FRIT_API void frit_validation_summary_get(const frit_validation* validation, frit_validation_summary* summary);
FRIT_API const double* frit_validation_trace(const frit_validation* validation, frit_trace_id which);
/* re and im each have room for summary.pole_count entries. */
FRIT_API void frit_validation_poles(const frit_validation* validation, double* re, double* im);

typedef struct frit_comparison {
  double j_fo;
  double j_io;
  double tracking_error_l1_fo;
  double tracking_error_l1_io;
  double max_abs_input_fo;
  double max_abs_input_io;
  double input_l1_fo;
  double input_l1_io;
  int fo_lower_loss;
  int fo_lower_tracking_error;
  int fo_lower_peak_input;
} frit_comparison;

FRIT_API frit_status frit_compare(const frit_validation* fo, double j_fo, const frit_validation* io, double j_io,
                                  frit_comparison* out);

/* ---- builtin benchmark cases ---- */

typedef struct frit_case frit_case;

FRIT_API size_t frit_case_count(void);
FRIT_API const char* frit_case_name_at(size_t index);
/* FRIT_E_UNKNOWN_NAME lists the valid names in frit_last_error(). */
FRIT_API frit_status frit_case_open(const char* name, frit_case** out);
FRIT_API void frit_case_free(frit_case* bench);

FRIT_API const char* frit_case_name(const frit_case* bench);
FRIT_API void frit_case_controller(const frit_case* bench, frit_controller_spec* spec);
FRIT_API double frit_case_sample_time(const frit_case* bench);
FRIT_API double frit_case_sim_time(const frit_case* bench);
/* Signals hold horizon + 1 samples. */
FRIT_API size_t frit_case_horizon(const frit_case* bench);
FRIT_API const double* frit_case_theta0(const frit_case* bench, size_t* n);
FRIT_API const double* frit_case_lower(const frit_case* bench, size_t* n);
FRIT_API const double* frit_case_upper(const frit_case* bench, size_t* n);
FRIT_API double frit_case_published_j0(const frit_case* bench);
FRIT_API double frit_case_published_j_star(const frit_case* bench);
FRIT_API const double* frit_case_published_theta_star(const frit_case* bench, size_t* n);
/* Discretized at the case sample time. */
FRIT_API frit_status frit_case_plant(const frit_case* bench, frit_tf** out);
FRIT_API frit_status frit_case_reference_model(const frit_case* bench, frit_tf** out);
FRIT_API const double* frit_case_reference_signal(const frit_case* bench, size_t* len);
/* Closed-loop experiment with the controller at theta0. */
FRIT_API frit_status frit_case_collect(const frit_case* bench, frit_record** out);
FRIT_API frit_status frit_case_validate(const frit_case* bench, const double* theta, size_t n,
                                        frit_validation** out);

#ifdef __cplusplus
}
#endif

#endif
