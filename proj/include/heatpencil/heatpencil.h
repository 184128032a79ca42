#ifndef HEATPENCIL_H
#define HEATPENCIL_H

/* C interface to the heatpencil library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns an hp_status; on failure hp_last_error() describes
 * the problem (thread-local, valid until the next call on that thread).
 * Strings returned through char** are released with hp_string_free. */

#include <stddef.h>

#if defined(HEATPENCIL_BUILDING)
#define HP_API __attribute__((visibility("default")))
#else
#define HP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hp_status {
  HP_OK = 0,
  HP_ERR_INVALID_ARGUMENT = 1,
  HP_ERR_DOMAIN = 2,
  HP_ERR_IO = 3,
  HP_ERR_PARSE = 4,
  HP_ERR_QUADRATURE = 5,
  HP_ERR_NO_MODES = 6,
  HP_ERR_RANK_DEFICIENT = 7,
  HP_ERR_AMBIGUOUS_INDEX = 8,
  HP_ERR_ALPHA_UNRECOVERABLE = 9,
  HP_ERR_HYPOTHESIS_VIOLATED = 10,
  HP_ERR_CERTIFICATE_UNAVAILABLE = 11,
  HP_ERR_DEFECTIVE = 12,
  HP_ERR_INTERNAL = 13
} hp_status;

typedef struct hp_problem hp_problem;
typedef struct hp_trace hp_trace;
typedef struct hp_result hp_result;

typedef struct hp_config {
  int n1;
  int n2;
  double epsilon;
  double t0;
  int m_tilde;
  int n_rec;
  double credibility_tol;
  int max_order; /* 0: no cap */
} hp_config;

typedef struct hp_priors {
  double m0;
  double alpha0;
} hp_priors;

HP_API const char* hp_version(void);
HP_API const char* hp_last_error(void);
HP_API const char* hp_status_name(hp_status status);
HP_API void hp_string_free(char* s);

HP_API void hp_config_default(hp_config* config);

/* problems */
HP_API hp_status hp_problem_load(const char* path, hp_problem** out);
HP_API hp_status hp_problem_parse(const char* json_text, hp_problem** out);
HP_API hp_status hp_problem_reference(hp_problem** out);
HP_API double hp_problem_alpha(const hp_problem* problem);
HP_API hp_status hp_problem_to_json(const hp_problem* problem, char** json_out);
HP_API void hp_problem_free(hp_problem* problem);

/* traces */
HP_API hp_status hp_trace_create(double t_start, double period, const double* values, size_t count, hp_trace** out);
HP_API hp_status hp_trace_load(const char* csv_path, hp_trace** out);
HP_API hp_status hp_trace_save(const hp_trace* trace, const char* csv_path);
HP_API size_t hp_trace_size(const hp_trace* trace);
HP_API double hp_trace_t_start(const hp_trace* trace);
HP_API double hp_trace_period(const hp_trace* trace);
HP_API const double* hp_trace_values(const hp_trace* trace);
HP_API void hp_trace_free(hp_trace* trace);

/* free, step and reconstruction windows */
HP_API hp_status hp_simulate(const hp_problem* problem, const hp_config* config, hp_trace** free_out,
                             hp_trace** step_out, hp_trace** rec_out);

HP_API hp_status hp_priors_load(const char* path, hp_priors* out);

/* identification; priors may be NULL (no certificate) */
HP_API hp_status hp_identify(const hp_trace* free_trace, const hp_trace* step_trace, const hp_trace* rec_trace,
                             const hp_config* config, const hp_priors* priors, hp_result** out);
HP_API double hp_result_alpha_hat(const hp_result* result);
HP_API int hp_result_gcv_k(const hp_result* result);
HP_API size_t hp_result_u0_coeffs(const hp_result* result, const double** coeffs_out);
HP_API int hp_result_has_certificate(const hp_result* result);
/* HP_ERR_CERTIFICATE_UNAVAILABLE when no interval exists */
HP_API hp_status hp_result_alpha_interval(const hp_result* result, double* lo, double* hi);
/* manifest_json may be NULL; otherwise it is embedded under "manifest" */
HP_API hp_status hp_result_to_json(const hp_result* result, const char* manifest_json, char** json_out);
/* gcv.svg, gcv.csv, u0.svg, u0.csv; reference may be NULL */
HP_API hp_status hp_result_write_plots(const hp_result* result, const char* dir, const hp_problem* reference);
HP_API void hp_result_free(hp_result* result);

/* certificate from a result document or raw diagnostics */
HP_API hp_status hp_bounds_from_json(const char* diagnostics_json, const hp_priors* priors, char** certificate_json);

/* pencil_parameter 0 selects the N/3 rule */
HP_API hp_status hp_pencil_analyze(const hp_trace* trace, int pencil_parameter, double epsilon, char** json_out);

/* reference experiment; writes traces, result.json and report.md into out_dir
 * when it is not NULL. all_pass receives 1 when every field is in tolerance. */
HP_API hp_status hp_repro_paper(const char* out_dir, int* all_pass, char** report_markdown);

#ifdef __cplusplus
}
#endif

#endif /* HEATPENCIL_H */
