#ifndef FLUIDQ_FLUIDQ_H
#define FLUIDQ_FLUIDQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FLUIDQ_BUILDING)
#    define FQ_API __declspec(dllexport)
#  else
#    define FQ_API __declspec(dllimport)
#  endif
#else
#  define FQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Return probabilities of Markov-modulated fluid queues.
 *
 * Every function reports through fq_status. On failure the thread-local
 * fq_last_error() holds a message; on success it is left alone. Matrices are
 * passed as row-major double arrays sized by the caller from fq_model_dims.
 * Phases are ordered with every up-phase (positive rate) first; within each
 * side the order of the input file is kept.
 */

typedef enum fq_status {
    FQ_OK = 0,
    FQ_ERR_INVALID_ARGUMENT = 1,
    FQ_ERR_NON_GENERATOR = 2,
    FQ_ERR_ZERO_RATE = 3,
    FQ_ERR_EMPTY_SIDE = 4,
    FQ_ERR_REDUCIBLE = 5,
    FQ_ERR_SINGULAR = 6,
    FQ_ERR_NO_CONVERGENCE = 7,
    FQ_ERR_DEGENERATE_DIAGONAL = 8,
    FQ_ERR_BAD_PARAMS = 9,
    FQ_ERR_SINGULAR_Q = 10,
    FQ_ERR_SINGULAR_CASCADE = 11,
    FQ_ERR_MAX_ITER = 12,
    FQ_ERR_NON_UNIT_RATES = 13,
    FQ_ERR_BAD_PSI = 14,
    FQ_ERR_INCONSISTENT = 15,
    FQ_ERR_NEED_PSI = 16,
    FQ_ERR_RATE_TOO_SMALL = 17,
    FQ_ERR_IO = 18,
    FQ_ERR_PARSE = 19,
    FQ_ERR_INTERNAL = 99
} fq_status;

typedef enum fq_variant {
    FQ_VARIANT_SDA = 0,
    FQ_VARIANT_SDA_SS = 1,
    FQ_VARIANT_ADDA = 2,
    FQ_VARIANT_CUSTOM = 3
} fq_variant;

typedef enum fq_classification {
    FQ_POSITIVE_RECURRENT = 0,
    FQ_NULL_RECURRENT = 1,
    FQ_TRANSIENT = 2,
    FQ_UNKNOWN = 3
} fq_classification;

typedef enum fq_qbd_kind {
    FQ_QBD_A = 0,
    FQ_QBD_B,
    FQ_QBD_C,
    FQ_QBD_APRIME,
    FQ_QBD_BPRIME,
    FQ_QBD_CPRIME,
    FQ_QBD_DELTA,
    FQ_QBD_THETA,
    FQ_QBD_MID_LEVEL_D
} fq_qbd_kind;

typedef enum fq_representation {
    FQ_REP_DOUBLE_SUM = 0,
    FQ_REP_SUM1 = 1,
    FQ_REP_SUM2 = 2,
    FQ_REP_SUM3 = 3
} fq_representation;

typedef struct fq_model fq_model;
typedef struct fq_solution fq_solution;
typedef struct fq_qbd fq_qbd;
typedef struct fq_series fq_series;
typedef struct fq_mc fq_mc;
typedef struct fq_verify fq_verify;

FQ_API const char* fq_last_error(void);
FQ_API const char* fq_status_name(fq_status status);
/* Frees strings returned through char** out-parameters. */
FQ_API void fq_string_free(char* s);

/* ---- models ---- */

FQ_API fq_status fq_model_load_json(const char* path, fq_model** out);
FQ_API fq_status fq_model_parse_json(const char* text, fq_model** out);
/* generator is n*n row-major; labels may be NULL. */
FQ_API fq_status fq_model_from_arrays(size_t n, const double* generator, const double* rates,
                                      const char* const* labels, fq_model** out);
FQ_API void fq_model_free(fq_model* model);
FQ_API fq_status fq_model_dims(const fq_model* model, size_t* n, size_t* n_plus, size_t* n_minus);
/* Label of canonical phase i (up-phases first). NULL when out of range. */
FQ_API const char* fq_model_label(const fq_model* model, size_t i);
FQ_API fq_status fq_model_mean_drift(const fq_model* model, double* out);
/* 2 max_i |T_ii| of the unit-rate model, the default lambda and mu. */
FQ_API fq_status fq_model_default_rate(const fq_model* model, double* out);
FQ_API fq_status fq_model_to_json(const fq_model* model, char** out);

/* ---- doubling ---- */

typedef struct fq_solve_options {
    fq_variant variant;
    int custom_params; /* nonzero: use alpha and beta below */
    double alpha;
    double beta;
    double epsilon;
    int max_iter;
} fq_solve_options;

typedef struct fq_solution_info {
    int iterations;
    int converged;
    fq_classification classification;
    int null_recurrence_suspected;
    double riccati_residual;
    double dual_residual;
    double dare_residual;
    double alpha;
    double beta;
    fq_variant variant;
} fq_solution_info;

FQ_API void fq_solve_options_default(fq_solve_options* options);
/* Returns FQ_ERR_MAX_ITER when the cap was hit; *out is still filled. */
FQ_API fq_status fq_solve(const fq_model* model, const fq_solve_options* options, fq_solution** out);
FQ_API void fq_solution_free(fq_solution* solution);
FQ_API fq_status fq_solution_info_get(const fq_solution* solution, fq_solution_info* out);
/* n_plus * n_minus doubles. */
FQ_API fq_status fq_solution_psi(const fq_solution* solution, double* out);
/* n_minus * n_plus doubles. */
FQ_API fq_status fq_solution_psi_hat(const fq_solution* solution, double* out);
FQ_API fq_status fq_solution_to_json(const fq_solution* solution, char** out);

/* ---- QBDs ---- */

FQ_API fq_status fq_qbd_kind_parse(const char* name, fq_qbd_kind* out);
/* Rescales to unit rates and, for kinds that need it, solves for Psi first. */
FQ_API fq_status fq_qbd_build(const fq_model* model, fq_qbd_kind kind, double lambda, double mu,
                              int allow_signed, fq_qbd** out);
FQ_API void fq_qbd_free(fq_qbd* qbd);
/* Each block is n*n with n the model size. */
FQ_API fq_status fq_qbd_blocks(const fq_qbd* qbd, double* down, double* same, double* up);
FQ_API fq_status fq_qbd_g_cyclic_reduction(const fq_qbd* qbd, double* g, int* iterations);
FQ_API fq_status fq_qbd_g_fixed_point(const fq_qbd* qbd, double* g, int* iterations);
/* include_solutions: also run both G solvers and embed their results. */
FQ_API fq_status fq_qbd_to_json(const fq_qbd* qbd, int include_solutions, char** out);

/* ---- oracles ---- */

FQ_API fq_status fq_representation_parse(const char* name, fq_representation* out);
FQ_API double fq_gamma_weight(int k, int n, double lambda, double mu);
/* Psi from the riccati fixed point; FQ_ERR_MAX_ITER leaves the last iterate in out. */
FQ_API fq_status fq_riccati_fixed_point(const fq_model* model, double tol, int max_iter, double* out,
                                        int* iterations);
/* Psi comes from an ADDA solve of the same model. */
FQ_API fq_status fq_series_compute(const fq_model* model, fq_representation rep, double lambda,
                                   double mu, int terms, fq_series** out);
FQ_API void fq_series_free(fq_series* series);
FQ_API fq_status fq_series_value(const fq_series* series, double* out, int* terms_used,
                                 double* last_increment_norm);
FQ_API fq_status fq_series_to_json(const fq_series* series, char** out);

typedef struct fq_sim_options {
    long long trials;
    uint64_t seed;
    double level_cap;
    double time_cap;
    int replicas;
    int threads; /* 0: hardware concurrency */
} fq_sim_options;

FQ_API void fq_sim_options_default(fq_sim_options* options);
FQ_API fq_status fq_simulate(const fq_model* model, const fq_sim_options* options, fq_mc** out);
FQ_API void fq_mc_free(fq_mc* mc);
FQ_API fq_status fq_mc_estimate(const fq_mc* mc, double* mean, double* halfwidth,
                                long long* capped_paths);
FQ_API fq_status fq_mc_to_json(const fq_mc* mc, char** out);

/* ---- verification ---- */

/* lambda and mu may be NULL for the default rate. */
FQ_API fq_status fq_verify_run(const fq_model* model, const double* lambda, const double* mu,
                               fq_verify** out);
FQ_API void fq_verify_free(fq_verify* report);
FQ_API size_t fq_verify_count(const fq_verify* report);
FQ_API fq_status fq_verify_check(const fq_verify* report, size_t i, const char** name, int* pass,
                                 const char** detail);
FQ_API int fq_verify_all_pass(const fq_verify* report);
FQ_API fq_status fq_verify_to_json(const fq_verify* report, char** out);

#ifdef __cplusplus
}
#endif

#endif
