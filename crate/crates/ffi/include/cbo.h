#ifndef CBO_H
#define CBO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Number of checks written by [`cbo_verify`].
 */
#define CBO_INVARIANT_COUNT 5

typedef enum CboStatus {
  CBO_STATUS_OK = 0,
  CBO_STATUS_NULL_POINTER = 1,
  CBO_STATUS_INVALID_ARGUMENT = 2,
  CBO_STATUS_HYPOTHESIS_VIOLATED = 3,
  CBO_STATUS_NUMERICAL_FAILURE = 4,
  CBO_STATUS_IO = 5,
  CBO_STATUS_PANIC = 6,
} CboStatus;

typedef enum CboIntegrator {
  CBO_INTEGRATOR_EULER = 0,
  CBO_INTEGRATOR_RK4 = 1,
} CboIntegrator;

typedef enum CboStopReason {
  CBO_STOP_REASON_GAP_CONVERGED = 0,
  CBO_STOP_REASON_T_MAX_REACHED = 1,
} CboStopReason;

/*
 Opaque objective handle.
 */
typedef struct CboObjective CboObjective;

/*
 Opaque sweep result handle.
 */
typedef struct CboSweepReport CboSweepReport;

/*
 Callback for custom objectives. Must be safe to call from several threads.
 */
typedef double (*CboObjectiveFn)(double x, void *user_data);

/*
 Integration settings; positions are passed separately.
 */
typedef struct CboSimConfig {
  double lambda;
  double alpha;
  enum CboIntegrator integrator;
  double dt;
  double gap_tol;
  double t_max;
  size_t sample_stride;
} CboSimConfig;

typedef struct CboOutcome {
  double x_inf_estimate;
  double final_gap;
  enum CboStopReason stop_reason;
  bool has_error_to_minimizer;
  double error_to_minimizer;
  double t_final;
  uint64_t steps;
} CboOutcome;

typedef struct CboCertificate {
  double x_star;
  double domain_lo;
  double domain_hi;
  double r1;
  double c1;
  double big_c1;
  double f_star;
  double f1;
  double delta;
  double r2;
  double c2;
  double alpha0;
} CboCertificate;

typedef struct CboSweepRow {
  double param;
  double x_inf;
  double abs_error;
  bool has_bound_lower;
  double bound_lower;
  bool has_bound_upper;
  double bound_upper;
  bool has_oracle;
  double oracle;
} CboSweepRow;

typedef struct CboInvariantCheck {
  /*
   Static, NUL-terminated; never freed by the caller.
   */
  const char *name;
  bool passed;
  double worst_residual;
  double threshold;
} CboInvariantCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL after a success.
 Valid until the next `cbo_*` call on the same thread.
 */
const char *cbo_last_error_message(void);

/*
 Static description of a status code.
 */
const char *cbo_status_string(enum CboStatus status);

const char *cbo_version(void);

/*
 Creates a catalogue objective. `params` may be NULL when `n_params` is 0.

 # Safety
 `name` must be a NUL-terminated string; `params` must point to `n_params`
 doubles; `out` must be writable.
 */
enum CboStatus cbo_objective_builtin(const char *name,
                                     const double *params,
                                     size_t n_params,
                                     struct CboObjective **out);

/*
 Piecewise-linear objective through `(xs[i], fs[i])`.

 # Safety
 `xs` and `fs` must each point to `n` doubles; `out` must be writable.
 */
enum CboStatus cbo_objective_table(const double *xs,
                                   const double *fs,
                                   size_t n,
                                   struct CboObjective **out);

/*
 Piecewise-linear objective read from a two-column `x,f` CSV file.

 # Safety
 `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
 */
enum CboStatus cbo_objective_table_csv(const char *path, struct CboObjective **out);

/*
 Objective on `[lo, hi]` evaluated through a C callback.

 # Safety
 `f` must be callable with `user_data` from any thread for as long as the
 returned handle (or anything derived from it) is alive, and must not unwind.
 */
enum CboStatus cbo_objective_custom(double lo,
                                    double hi,
                                    CboObjectiveFn f,
                                    void *user_data,
                                    struct CboObjective **out);

/*
 Declares the global minimizer of an objective.

 # Safety
 `obj` must be a live handle not used concurrently by another thread.
 */
enum CboStatus cbo_objective_set_minimizer(struct CboObjective *obj, double x_star);

/*
 Declares a Lipschitz constant, used as a safety margin by certificates.

 # Safety
 `obj` must be a live handle not used concurrently by another thread.
 */
enum CboStatus cbo_objective_set_lipschitz(struct CboObjective *obj, double lipschitz);

/*
 # Safety
 `obj` must be NULL or a handle from a `cbo_objective_*` constructor, freed once.
 */
void cbo_objective_free(struct CboObjective *obj);

/*
 # Safety
 `obj` must be a live handle; `lo` and `hi` must be writable.
 */
enum CboStatus cbo_objective_domain(const struct CboObjective *obj, double *lo, double *hi);

/*
 Writes the known minimizer, or sets `*known = false` when there is none.

 # Safety
 `obj` must be a live handle; `known` and `x_star` must be writable.
 */
enum CboStatus cbo_objective_minimizer(const struct CboObjective *obj, bool *known, double *x_star);

/*
 # Safety
 `obj` must be a live handle; `out` must be writable.
 */
enum CboStatus cbo_objective_eval(const struct CboObjective *obj, double x, double *out);

/*
 Softmax weights of `-alpha f` at `positions`, written to `psi_out[0..n]`.

 # Safety
 `positions` and `psi_out` must each point to `n` doubles.
 */
enum CboStatus cbo_weights(const struct CboObjective *obj,
                           double alpha,
                           const double *positions,
                           size_t n,
                           double *psi_out);

/*
 `sum psi_i x_i`, clamped to the hull of the positions.

 # Safety
 `positions` and `psi` must each point to `n` doubles; `out` must be writable.
 */
enum CboStatus cbo_consensus_point(const double *positions,
                                   const double *psi,
                                   size_t n,
                                   double *out);

/*
 Defaults for the given rates: RK4, `dt = 1e-3 / lambda`, `gap_tol = 1e-10`,
 `t_max = 200 / lambda`, stride 1.
 */
struct CboSimConfig cbo_sim_config_default(double lambda, double alpha);

/*
 Integrates the particle system until the gap falls below `gap_tol` or
 `t_max` is reached. Reaching `t_max` is reported in `stop_reason`, not as
 an error.

 # Safety
 `config` must be readable, `positions` must point to `n` doubles and
 `out` must be writable.
 */
enum CboStatus cbo_simulate(const struct CboObjective *obj,
                            const struct CboSimConfig *config,
                            const double *positions,
                            size_t n,
                            struct CboOutcome *out);

/*
 Two-particle limit through the gap variable; `positions` holds two values.

 # Safety
 `config` must be readable, `positions` must point to 2 doubles and `out`
 must be writable.
 */
enum CboStatus cbo_reduced_two_particle(const struct CboObjective *obj,
                                        const struct CboSimConfig *config,
                                        const double *positions,
                                        struct CboOutcome *out);

/*
 Calyx certificate on a grid of `grid_n` points. Returns
 `HypothesisViolated` when the curvature at the minimizer vanishes or the
 minimizer is not isolated on the grid.

 # Safety
 `obj` must be a live handle; `out` must be writable.
 */
enum CboStatus cbo_certify(const struct CboObjective *obj,
                           size_t grid_n,
                           struct CboCertificate *out);

/*
 `B(alpha) = ln 2 / (alpha c2) + sqrt(ln 2 / (alpha c1))`; `InvalidArgument`
 when `alpha <= alpha0`.

 # Safety
 `cert` must be readable; `out` must be writable.
 */
enum CboStatus cbo_certificate_bound(const struct CboCertificate *cert, double alpha, double *out);

/*
 Exact error for `f(x) = x` with two particles `width` apart.
 */
double cbo_oracle_linear_error(double alpha, double width);

/*
 Exact error for `f(x) = x` with `j` of `n` particles on the minimizer.

 # Safety
 `out` must be writable.
 */
enum CboStatus cbo_oracle_nparticle_linear_error(double alpha,
                                                 size_t n,
                                                 size_t j,
                                                 double width,
                                                 double *out);

/*
 Two-sided bound for `f(x) = x^2` on `[0, b]` with particles at `0` and `b`.

 # Safety
 `lower` and `upper` must be writable.
 */
enum CboStatus cbo_oracle_quadratic_bounds(double alpha, double b, double *lower, double *upper);

/*
 Error against each alpha in `alphas` (strictly increasing).

 # Safety
 `config` must be readable, `positions` must point to `n` doubles,
 `alphas` to `n_alphas` doubles, and `out` must be writable.
 */
enum CboStatus cbo_sweep_alpha(const struct CboObjective *obj,
                               const struct CboSimConfig *config,
                               const double *positions,
                               size_t n,
                               const double *alphas,
                               size_t n_alphas,
                               struct CboSweepReport **out);

/*
 Linear objective on `[0, width]` with `j` particles at 0, for each count in `ns`.

 # Safety
 `config` must be readable, `ns` must point to `n_ns` values and `out`
 must be writable.
 */
enum CboStatus cbo_sweep_n(double alpha,
                           double width,
                           const size_t *ns,
                           size_t n_ns,
                           size_t j,
                           const struct CboSimConfig *config,
                           struct CboSweepReport **out);

/*
 Number of rows; 0 for a NULL handle.

 # Safety
 `report` must be NULL or a live handle.
 */
size_t cbo_sweep_report_len(const struct CboSweepReport *report);

/*
 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum CboStatus cbo_sweep_report_row(const struct CboSweepReport *report,
                                    size_t index,
                                    struct CboSweepRow *out);

/*
 Fitted slope and its standard error; `*defined = false` when fewer than
 two rows lie above the noise floor.

 # Safety
 `report` must be a live handle; the out-pointers must be writable.
 */
enum CboStatus cbo_sweep_report_slope(const struct CboSweepReport *report,
                                      bool *defined,
                                      double *slope,
                                      double *stderr);

/*
 # Safety
 `report` must be NULL or a handle from a sweep function, freed once.
 */
void cbo_sweep_report_free(struct CboSweepReport *report);

/*
 Runs the invariant checks and writes `CBO_INVARIANT_COUNT` entries to
 `checks`. Failed checks are reported through `passed`, not the status.

 # Safety
 `config` must be readable, `positions` must point to `n` doubles,
 `checks` must have room for `CBO_INVARIANT_COUNT` entries and
 `all_passed` must be writable.
 */
enum CboStatus cbo_verify(const struct CboObjective *obj,
                          const struct CboSimConfig *config,
                          const double *positions,
                          size_t n,
                          struct CboInvariantCheck *checks,
                          bool *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBO_H */
