/* Gaussian Minkowski problems on C-pseudo-cones: C interface.
 *
 * All functions return a gpc_status. On failure the message of the most
 * recent error on the calling thread is available from gpc_last_error().
 * Objects are opaque and owned by the caller; free them with the matching
 * *_free function (NULL is accepted). Strings returned through char** must
 * be released with gpc_string_free.
 */
#ifndef GPC_H
#define GPC_H

#include <stddef.h>
#include <stdint.h>

#if defined(GPC_BUILDING_LIBRARY)
#define GPC_API __attribute__((visibility("default")))
#else
#define GPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gpc_status {
    GPC_OK = 0,
    GPC_INVALID_INPUT,
    GPC_DIMENSION_MISMATCH,
    GPC_NOT_UNIT_VECTOR,
    GPC_NOT_POINTED,
    GPC_NOT_FULL_DIMENSIONAL,
    GPC_INCONSISTENT_DUAL_DATA,
    GPC_BAD_REFERENCE_DIRECTION,
    GPC_DIRECTION_NOT_INTERIOR,
    GPC_NON_POSITIVE_SUPPORT,
    GPC_DIRECTION_OUTSIDE_CONE,
    GPC_MISMATCHED_OMEGA,
    GPC_LP_UNBOUNDED,
    GPC_LP_INFEASIBLE,
    GPC_EMPTY_OMEGA_C,
    GPC_INACTIVE_FACET,
    GPC_ZERO_VOLUME,
    GPC_NOT_CONVERGED,
    GPC_INFEASIBLE_WEIGHT,
    GPC_DEGENERATE_MEASURE,
    GPC_STEP_TOO_LARGE,
    GPC_PEAK_NOT_FOUND,
    GPC_VERIFICATION_FAILED,
    GPC_PARSE_ERROR,
    GPC_VALIDATION_ERROR,
    GPC_IO_ERROR,
    GPC_INTERNAL
} gpc_status;

typedef struct gpc_cone gpc_cone;
typedef struct gpc_shape gpc_shape;
typedef struct gpc_problem gpc_problem;
typedef struct gpc_run gpc_run;

GPC_API const char* gpc_version(void);
GPC_API const char* gpc_status_name(gpc_status status);
GPC_API const char* gpc_last_error(void);
/* Process exit code for a failed call: 2 not converged, 3 infeasible,
 * 4 invalid input, 1 otherwise; 0 for GPC_OK. */
GPC_API int gpc_exit_code(gpc_status status);
GPC_API void gpc_string_free(char* s);

/* ---- geometry ------------------------------------------------------------
 * Matrices are row-major with one vector per row. ref_dir may be NULL. */
GPC_API gpc_status gpc_cone_create(int dim, const double* generators, size_t n_generators, const double* normals,
                                   size_t n_normals, const double* ref_dir, gpc_cone** out);
GPC_API void gpc_cone_free(gpc_cone* cone);
GPC_API int gpc_cone_dim(const gpc_cone* cone);
/* Exact Gaussian volume of the cone when known (n <= 3); *known is 0 otherwise. */
GPC_API gpc_status gpc_cone_volume_exact(const gpc_cone* cone, double* value, int* known);

GPC_API gpc_status gpc_shape_create(const gpc_cone* cone, const double* directions, size_t n_directions,
                                    const double* support, gpc_shape** out);
GPC_API void gpc_shape_free(gpc_shape* shape);
GPC_API size_t gpc_shape_facet_count(const gpc_shape* shape);
/* Writes facet_count values. */
GPC_API gpc_status gpc_shape_effective_support(const gpc_shape* shape, double* out);
/* Radial function at a direction of the cone interior; *facet receives the
 * maximizing index (may be NULL). */
GPC_API gpc_status gpc_shape_radial(const gpc_shape* shape, const double* v, double* rho, size_t* facet);

/* ---- Gaussian measures (Monte Carlo, seeded) ------------------------------ */
GPC_API gpc_status gpc_shape_gauss_volume(const gpc_shape* shape, uint64_t seed, int64_t samples, double* value,
                                          double* std_err);
GPC_API gpc_status gpc_shape_covolume(const gpc_shape* shape, uint64_t seed, int64_t samples, double* value,
                                      double* std_err);
/* Surface measure on the shape's directions; writes facet_count values to
 * weights and to std_errs (may be NULL). */
GPC_API gpc_status gpc_shape_surface_measure(const gpc_shape* shape, uint64_t seed, int64_t samples, double* weights,
                                             double* std_errs);

/* ---- problem files and runs ---------------------------------------------- */
GPC_API gpc_status gpc_problem_parse_file(const char* path, gpc_problem** out);
GPC_API gpc_status gpc_problem_parse_string(const char* text, gpc_problem** out);
GPC_API void gpc_problem_free(gpc_problem* problem);
/* Sets a dotted field ("seed", "solver.tol_residual", "problem") to a JSON
 * value (bare words are taken as strings) and revalidates. */
GPC_API gpc_status gpc_problem_set(gpc_problem* problem, const char* key, const char* value);
/* Task name: surface, log, measure, verify or counterexample. */
GPC_API const char* gpc_problem_task(const gpc_problem* problem);
GPC_API gpc_status gpc_problem_digest(const gpc_problem* problem, char** out);
GPC_API gpc_status gpc_problem_canonical(const gpc_problem* problem, char** out);

/* Runs the problem under root (NULL: $GPC_RUN_ROOT, else ./runs). */
GPC_API gpc_status gpc_run_problem(const gpc_problem* problem, const char* root, gpc_run** out);
GPC_API void gpc_run_free(gpc_run* run);
GPC_API const char* gpc_run_directory(const gpc_run* run);
GPC_API const char* gpc_run_digest(const gpc_run* run);
GPC_API const char* gpc_run_report(const gpc_run* run);
/* 0 ok, 1 a verification check failed, 2 not converged. */
GPC_API int gpc_run_exit_code(const gpc_run* run);
GPC_API int gpc_run_reused(const gpc_run* run);

/* Scan CSV for the single-facet shapes [(C, {b}, t)] on a log grid. b NULL
 * takes the problem's counterexample/scan direction; count <= 0 and
 * non-positive bounds take the problem's scan settings. */
GPC_API gpc_status gpc_scan_csv(const gpc_problem* problem, const double* b, double t_min, double t_max, int count,
                                char** csv);

#ifdef __cplusplus
}
#endif

#endif /* GPC_H */
