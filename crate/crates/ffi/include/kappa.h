#ifndef KAPPA_H
#define KAPPA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KappaStatus {
  KAPPA_STATUS_OK = 0,
  KAPPA_STATUS_NULL_POINTER = 1,
  KAPPA_STATUS_INVALID_ARGUMENT = 2,
  KAPPA_STATUS_UNKNOWN_PROBLEM = 3,
  KAPPA_STATUS_NO_CONVERGENCE = 4,
  KAPPA_STATUS_NUMERICAL = 5,
  KAPPA_STATUS_IO = 6,
  KAPPA_STATUS_PANIC = 7,
} KappaStatus;

// An integral problem.
typedef struct KappaProblem KappaProblem;

// A converged Picard solution.
typedef struct KappaSolution KappaSolution;

// Solver settings; `rho <= 0` disables the ball monitor.
typedef struct KappaSolveConfig {
  double tol;
  size_t max_iter;
  double step_x;
  double step_y;
  double truncation;
  double rho;
} KappaSolveConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library.
const char *kappa_last_error_message(void);

// Library version as a static string.
const char *kappa_version(void);

struct KappaSolveConfig kappa_solve_config_default(void);

// Loads a named integral problem such as `"hyperbolic-erf"`.
//
// # Safety
// `id` must be a NUL-terminated string and `out` a valid pointer.
enum KappaStatus kappa_problem_load(const char *id, struct KappaProblem **out);

// Parses a problem from its JSON definition.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum KappaStatus kappa_problem_from_json(const char *json, struct KappaProblem **out);

// # Safety
// `problem` must come from this library and not be used afterwards.
void kappa_problem_free(struct KappaProblem *problem);

// `∫|G(t,s)| ds` at the point `t` of length `dim`.
//
// # Safety
// Pointers must be valid; `t` must hold `dim` values.
enum KappaStatus kappa_kernel_abs_integral(const struct KappaProblem *problem,
                                           const double *t,
                                           size_t dim,
                                           double *out);

// Index-one condition at `rho` on the grid with the given steps.
//
// # Safety
// Pointers must be valid.
enum KappaStatus kappa_index_one(const struct KappaProblem *problem,
                                 double rho,
                                 double step_x,
                                 double step_y,
                                 double *out_lhs,
                                 bool *out_holds);

// Solves by Picard iteration from zero.
//
// # Safety
// Pointers must be valid.
enum KappaStatus kappa_solve(const struct KappaProblem *problem,
                             const struct KappaSolveConfig *config,
                             struct KappaSolution **out);

// # Safety
// `solution` must come from this library and not be used afterwards.
void kappa_solution_free(struct KappaSolution *solution);

// Number of Picard steps, or 0 for a null handle.
//
// # Safety
// `solution` must be null or valid.
size_t kappa_solution_iterations(const struct KappaSolution *solution);

// `sup |u|`, or NaN for a null handle.
//
// # Safety
// `solution` must be null or valid.
double kappa_solution_beta(const struct KappaSolution *solution);

// PDE residual, or NaN when unavailable.
//
// # Safety
// `solution` must be null or valid.
double kappa_solution_residual(const struct KappaSolution *solution);

// Number of grid nodes.
//
// # Safety
// `solution` must be null or valid.
size_t kappa_solution_len(const struct KappaSolution *solution);

// Copies the nodal values (row-major, last axis fastest) into `buf`.
//
// # Safety
// `buf` must hold `len` doubles.
enum KappaStatus kappa_solution_samples(const struct KappaSolution *solution,
                                        double *buf,
                                        size_t len);

// Number of points in the profile at infinity.
//
// # Safety
// `solution` must be null or valid.
size_t kappa_solution_profile_len(const struct KappaSolution *solution);

// Copies the first transverse coordinate and the limit value of each
// profile point.
//
// # Safety
// `coord` and `value` must hold `len` doubles.
enum KappaStatus kappa_solution_profile(const struct KappaSolution *solution,
                                        double *coord,
                                        double *value,
                                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAPPA_H */
