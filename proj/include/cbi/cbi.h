/*
 * C interface to the CBI numerics library.
 *
 * All objects are opaque handles created by *_new / *_load / producer calls
 * and released with the matching *_free. Every fallible call returns a
 * cbi_status; on failure cbi_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on the same thread).
 * Vectors are passed as (pointer, length) pairs; matrices are row-major d*d
 * arrays. Indices are 0-based.
 */
#ifndef CBI_CBI_H
#define CBI_CBI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CBI_BUILDING_LIBRARY)
#    define CBI_API __declspec(dllexport)
#  else
#    define CBI_API __declspec(dllimport)
#  endif
#else
#  define CBI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CBI_OK = 0,
    CBI_ERR_INVALID_ARGUMENT = 1,
    CBI_ERR_DIMENSION = 2,
    CBI_ERR_INADMISSIBLE = 3,
    CBI_ERR_NUMERIC_RANGE = 4,
    CBI_ERR_SOLVER = 5,
    CBI_ERR_CLASSIFICATION = 6,
    CBI_ERR_PARSE = 7,
    CBI_ERR_NULL_POINTER = 8,
    CBI_ERR_INTERNAL = 99
} cbi_status;

typedef enum {
    CBI_VERDICT_CONVERGES = 0,
    CBI_VERDICT_DIVERGES_LINEARLY = 1,
    CBI_VERDICT_INDETERMINATE = 2
} cbi_verdict;

typedef struct cbi_params cbi_params;
typedef struct cbi_vsolution cbi_vsolution;
typedef struct cbi_table cbi_table;
typedef struct cbi_test_function cbi_test_function;
typedef struct cbi_paths cbi_paths;

/* Riccati solver settings. atol is relative to max|lambda|. quad_order <= 0 selects the
   default Gauss-Legendre order, here and in every quad_order argument. */
typedef struct {
    double rtol;
    double atol;
    int quad_order;
} cbi_solver_options;

typedef struct {
    long accepted_steps;
    long rejected_steps;
    long rhs_evals;
    long clip_events;
    double clipped_total;
    double max_error_estimate;
} cbi_solver_stats;

typedef struct {
    const double* x0;  /* length d */
    size_t d;
    double horizon;
    double dt;
    uint64_t seed;
    int n_paths;
    int record_every;  /* 0: start and end only */
    int record_jumps;  /* nonzero: keep the jump log */
} cbi_path_config;

CBI_API const char* cbi_version(void);
CBI_API const char* cbi_last_error(void);
CBI_API const char* cbi_status_name(cbi_status status);
CBI_API void cbi_string_free(char* s);

/* rtol 1e-10, atol 1e-12, 32 Gauss-Legendre nodes */
CBI_API void cbi_solver_options_default(cbi_solver_options* opts);
/* tighter settings used for generator limits: rtol 1e-13, atol 1e-15 */
CBI_API void cbi_generator_options_default(cbi_solver_options* opts);

/* ---- parameters ------------------------------------------------------- */

CBI_API cbi_status cbi_params_from_json(const char* json_text, cbi_params** out);
CBI_API cbi_status cbi_params_load(const char* path, cbi_params** out);
CBI_API void cbi_params_free(cbi_params* params);
CBI_API cbi_status cbi_params_dim(const cbi_params* params, int* out_d);
CBI_API cbi_status cbi_params_to_json(const cbi_params* params, char** out_json);

/* Never fails on inadmissible parameters; *out_admissible reports the outcome.
 * out_report_json may be NULL. */
CBI_API cbi_status cbi_validate(const cbi_params* params, int* out_admissible, char** out_report_json);

/* Btilde, beta~, C_k, spectrum, classification, Perron pair and Cbar (critical). */
CBI_API cbi_status cbi_derive(const cbi_params* params, double critical_tol, char** out_json);

/* ---- matrices and moments --------------------------------------------- */

CBI_API cbi_status cbi_mat_exp(const double* a, size_t d, double t, double* out);
CBI_API cbi_status cbi_is_irreducible(const double* a, size_t d, int* out);
CBI_API cbi_status cbi_mean(const cbi_params* params, const double* x, size_t d, double t, int quad_order,
                            double* out_mean);
CBI_API cbi_status cbi_variance_no_immigration(const cbi_params* params, const double* z, size_t d, double t,
                                               int quad_order, double* out_cov);

/* ---- branching / immigration mechanisms and the Riccati system -------- */

CBI_API cbi_status cbi_phi(const cbi_params* params, const double* lambda, size_t d, double* out);
CBI_API cbi_status cbi_psi(const cbi_params* params, const double* lambda, size_t d, double* out);
CBI_API cbi_status cbi_psi_grad(const cbi_params* params, const double* lambda, size_t d, double* out);

CBI_API cbi_status cbi_vsolve(const cbi_params* params, double t, const double* lambda, size_t d,
                              const cbi_solver_options* opts, cbi_vsolution** out);
CBI_API cbi_status cbi_vsolution_eval(const cbi_vsolution* sol, double s, double* out_v, size_t d);
CBI_API cbi_status cbi_vsolution_psi_integral(const cbi_vsolution* sol, double* out);
CBI_API cbi_status cbi_vsolution_stats(const cbi_vsolution* sol, cbi_solver_stats* out);
CBI_API void cbi_vsolution_free(cbi_vsolution* sol);

CBI_API cbi_status cbi_laplace(const cbi_params* params, double t, const double* x, const double* lambda, size_t d,
                               const cbi_solver_options* opts, double* out);

CBI_API cbi_status cbi_v_jacobian_limit(const cbi_params* params, double t, double* out);
CBI_API cbi_status cbi_v_hessian_limit(const cbi_params* params, double t, int i, int j, int k, int quad_order,
                                       double* out);

/* ---- discrete generators on exponentials ------------------------------ */

CBI_API cbi_status cbi_discrete_gen_exp(const cbi_params* params, int64_t n, const double* x, const double* lambda,
                                        size_t d, const cbi_solver_options* opts, double* out);
CBI_API cbi_status cbi_prop31_limit(const cbi_params* params, const double* x, const double* lambda, size_t d,
                                    int quad_order, double* out);
CBI_API cbi_status cbi_prop31_table(const cbi_params* params, const double* x, const double* lambda, size_t d,
                                    const int64_t* n_list, size_t count, const cbi_solver_options* opts,
                                    cbi_table** out);
CBI_API cbi_status cbi_table_size(const cbi_table* table, size_t* out);
CBI_API cbi_status cbi_table_row(const cbi_table* table, size_t row, int64_t* n, double* raw, double* corrected,
                                 double* gap);
CBI_API cbi_status cbi_table_summary(const cbi_table* table, double* limit, cbi_verdict* verdict,
                                     double* fitted_slope, double* expected_slope);
CBI_API void cbi_table_free(cbi_table* table);
CBI_API cbi_status cbi_convergence_criterion(const cbi_params* params, const double* x, const double* lambda,
                                             size_t d, double tol, int* out);

/* ---- generators on C^2_c test functions ------------------------------- */

CBI_API cbi_status cbi_bump_new(const double* center, size_t d, double radius, double amplitude,
                                cbi_test_function** out);
/* (a0 + <g, x-c> + 1/2 (x-c)^T H (x-c)) * bump; h is row-major d*d */
CBI_API cbi_status cbi_poly_bump_new(const double* center, size_t d, double radius, double amplitude, double a0,
                                     const double* g, const double* h, cbi_test_function** out);
/* grad (length d) and hess (d*d) may be NULL */
CBI_API cbi_status cbi_test_function_eval(const cbi_test_function* f, const double* x, size_t d, double* value,
                                          double* grad, double* hess);
CBI_API void cbi_test_function_free(cbi_test_function* f);

CBI_API cbi_status cbi_generator_apply(const cbi_params* params, const cbi_test_function* f, const double* x,
                                       size_t d, double* out);
CBI_API cbi_status cbi_generator_forms(const cbi_params* params, const cbi_test_function* f, const double* x,
                                       size_t d, double* standard, double* compensated);
CBI_API cbi_status cbi_scaled_gen_apply(const cbi_params* params, int64_t n, const cbi_test_function* f,
                                        const double* x, size_t d, double* out);
CBI_API cbi_status cbi_scaled_drift_term(const cbi_params* params, int64_t n, const cbi_test_function* f,
                                         const double* x, size_t d, double* out);
CBI_API cbi_status cbi_cignc_limit(const cbi_params* params, const cbi_test_function* f, const double* x, size_t d,
                                   double* out);
CBI_API cbi_status cbi_drift_criterion(const cbi_params* params, const cbi_test_function* f, const double* x,
                                       size_t d, double tol, int* out);

/* ---- simulation -------------------------------------------------------- */

CBI_API cbi_status cbi_simulate(const cbi_params* params, const cbi_path_config* cfg, cbi_paths** out);
CBI_API cbi_status cbi_simulate_scaled(const cbi_params* params, int64_t n, const cbi_path_config* cfg,
                                       cbi_paths** out);
/* Limit paths carry d + 1 state columns: the scalar diffusion, then its ray embedding. */
CBI_API cbi_status cbi_simulate_limit(const cbi_params* params, const cbi_path_config* cfg, cbi_paths** out);
CBI_API cbi_status cbi_limit_coefficients(const cbi_params* params, double* drift, double* diffusion,
                                          double* u_right, double* u_left);

CBI_API cbi_status cbi_paths_count(const cbi_paths* paths, size_t* out);
CBI_API cbi_status cbi_paths_dim(const cbi_paths* paths, size_t* out);
CBI_API cbi_status cbi_paths_length(const cbi_paths* paths, size_t path, size_t* out);
/* Borrowed pointers, valid until cbi_paths_free. States are row-major length*dim. */
CBI_API cbi_status cbi_paths_times(const cbi_paths* paths, size_t path, const double** out);
CBI_API cbi_status cbi_paths_states(const cbi_paths* paths, size_t path, const double** out);
CBI_API cbi_status cbi_paths_jump_count(const cbi_paths* paths, size_t path, size_t* out);
/* source: -1 immigration, i >= 0 branching of type i; jump has length d */
CBI_API cbi_status cbi_paths_jump(const cbi_paths* paths, size_t path, size_t index, double* time, int* source,
                                  double* jump);
/* mean and se have length dim; cov and cov_se are dim*dim (cov_se may be NULL) */
CBI_API cbi_status cbi_paths_terminal_stats(const cbi_paths* paths, double* mean, double* mean_se, double* cov,
                                            double* cov_se);
CBI_API cbi_status cbi_paths_empirical_laplace(const cbi_paths* paths, const double* lambda, size_t dim,
                                               double* value, double* se);
CBI_API void cbi_paths_free(cbi_paths* paths);

#ifdef __cplusplus
}
#endif

#endif /* CBI_CBI_H */
