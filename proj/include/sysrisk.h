/* C interface to the sysrisk library. All functions return a sysrisk_status;
   on failure sysrisk_last_error() describes the problem (per thread). Objects
   are opaque and released with their matching *_destroy / *_free function. */
#ifndef SYSRISK_H
#define SYSRISK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SYSRISK_API __declspec(dllexport)
#else
#define SYSRISK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sysrisk_status {
  SYSRISK_OK = 0,
  SYSRISK_INVALID_ARGUMENT = 1,
  SYSRISK_PARSE_ERROR = 2,
  SYSRISK_VALIDATION_ERROR = 3,
  SYSRISK_SOLVER_ERROR = 4,
  SYSRISK_IO_ERROR = 5,
  SYSRISK_INTERNAL_ERROR = 6
} sysrisk_status;

typedef struct sysrisk_system sysrisk_system;
typedef struct sysrisk_solution sysrisk_solution;

SYSRISK_API const char* sysrisk_last_error(void);
SYSRISK_API const char* sysrisk_status_name(sysrisk_status status);

/* Strings handed out by the library; release with sysrisk_string_free. */
SYSRISK_API void sysrisk_string_free(char* text);

/* ---- systems ---- */

/* liabilities: n*n row-major, entry (i, j) is what bank i owes bank j.
   kappa may be NULL (all ones). ids may be NULL ("B0", "B1", ...). */
SYSRISK_API sysrisk_status sysrisk_system_create(size_t n, const double* equity, const double* liabilities,
                                                 const double* kappa, const char* const* ids,
                                                 sysrisk_system** out);
SYSRISK_API sysrisk_status sysrisk_system_load_csv(const char* banks_path, const char* exposures_path,
                                                   sysrisk_system** out);
SYSRISK_API sysrisk_status sysrisk_system_save_csv(const sysrisk_system* system, const char* banks_path,
                                                   const char* exposures_path);
SYSRISK_API void sysrisk_system_destroy(sysrisk_system* system);

SYSRISK_API size_t sysrisk_system_size(const sysrisk_system* system);
SYSRISK_API const char* sysrisk_system_bank_id(const sysrisk_system* system, size_t i);
/* Copies the n*n liability matrix (row-major). */
SYSRISK_API sysrisk_status sysrisk_system_liabilities(const sysrisk_system* system, double* out);

/* SYSRISK_OK when well-formed, otherwise SYSRISK_VALIDATION_ERROR with a
   newline-separated list of violations in *report (may be NULL). */
SYSRISK_API sysrisk_status sysrisk_validate(const sysrisk_system* system, char** report);

/* ---- contagion: out arrays hold n values ---- */

SYSRISK_API sysrisk_status sysrisk_debtrank(const sysrisk_system* system, double* out);
/* epsilon <= 0 selects the default 1e-6. converged may be NULL. */
SYSRISK_API sysrisk_status sysrisk_debtrank2(const sysrisk_system* system, double epsilon, double* out,
                                             int* converged);
SYSRISK_API sysrisk_status sysrisk_direct_impact(const sysrisk_system* system, double* out);

/* ---- optimisation ---- */

typedef enum sysrisk_direction { SYSRISK_MINIMIZE = 0, SYSRISK_MAXIMIZE = 1 } sysrisk_direction;
typedef enum sysrisk_risk_sense { SYSRISK_RISK_EQUAL = 0, SYSRISK_RISK_GREATER_EQUAL = 1 } sysrisk_risk_sense;
typedef enum sysrisk_solve_status {
  SYSRISK_SOLVE_OPTIMAL = 0,
  SYSRISK_SOLVE_GAP_REACHED = 1,
  SYSRISK_SOLVE_INFEASIBLE = 2,
  SYSRISK_SOLVE_LIMIT_HIT = 3
} sysrisk_solve_status;

typedef struct sysrisk_solve_options {
  double gap_tolerance;
  double time_limit_seconds; /* 0: none */
  uint64_t node_limit;       /* 0: none */
  int deterministic_tie_breaking;
  sysrisk_risk_sense risk_sense;
} sysrisk_solve_options;

SYSRISK_API void sysrisk_solve_options_init(sysrisk_solve_options* options);

/* Succeeds whenever the solver ran; inspect the solution status. */
SYSRISK_API sysrisk_status sysrisk_optimize(const sysrisk_system* system, sysrisk_direction direction,
                                            const sysrisk_solve_options* options, sysrisk_solution** out);
SYSRISK_API void sysrisk_solution_destroy(sysrisk_solution* solution);
SYSRISK_API sysrisk_solve_status sysrisk_solution_status(const sysrisk_solution* solution);
SYSRISK_API int sysrisk_solution_has_network(const sysrisk_solution* solution);
SYSRISK_API double sysrisk_solution_objective(const sysrisk_solution* solution);
SYSRISK_API double sysrisk_solution_best_bound(const sysrisk_solution* solution);
SYSRISK_API double sysrisk_solution_gap(const sysrisk_solution* solution);
SYSRISK_API uint64_t sysrisk_solution_nodes(const sysrisk_solution* solution);
/* Copies the optimised n*n liability matrix (row-major). */
SYSRISK_API sysrisk_status sysrisk_solution_liabilities(const sysrisk_solution* solution, double* out);
/* New system: the input system with the optimised liabilities. */
SYSRISK_API sysrisk_status sysrisk_solution_system(const sysrisk_solution* solution, sysrisk_system** out);

/* ---- analysis and files ---- */

typedef enum sysrisk_assortativity {
  SYSRISK_ASSORT_SOURCE_OUT_TARGET_IN = 0,
  SYSRISK_ASSORT_SOURCE_IN_TARGET_OUT = 1,
  SYSRISK_ASSORT_TOTAL_DEGREE = 2
} sysrisk_assortativity;

/* JSON with the topology of the network and of its thresholded variant. */
SYSRISK_API sysrisk_status sysrisk_metrics_json(const sysrisk_system* system, double threshold_coverage,
                                                sysrisk_assortativity convention, char** json);

SYSRISK_API sysrisk_status sysrisk_export_mps(const sysrisk_system* system, sysrisk_direction direction,
                                              sysrisk_risk_sense risk_sense, char** mps);

typedef struct sysrisk_synth_options {
  size_t n;
  double density;
  int uniform_weights; /* 0: log-normal(weight_a, weight_b); 1: uniform[weight_a, weight_b] */
  double weight_a;
  double weight_b;
  int lognormal_equity; /* 0: equity_a * (a_i + 1); 1: log-normal(equity_a, equity_b) */
  double equity_a;
  double equity_b;
  int leverage_kappa; /* 0: constant 1; 1: leverage drawn in [5, 20] */
  uint64_t seed;
} sysrisk_synth_options;

SYSRISK_API void sysrisk_synth_options_init(sysrisk_synth_options* options);
SYSRISK_API sysrisk_status sysrisk_generate(const sysrisk_synth_options* options, sysrisk_system** out);

typedef struct sysrisk_pipeline_options {
  sysrisk_solve_options solve;
  double threshold_coverage;
  double debtrank2_epsilon;
  sysrisk_assortativity convention;
  int include_timings;
  const char* run_label; /* NULL: "run" */
} sysrisk_pipeline_options;

SYSRISK_API void sysrisk_pipeline_options_init(sysrisk_pipeline_options* options);
/* json and long_csv may each be NULL when not wanted. */
SYSRISK_API sysrisk_status sysrisk_pipeline(const sysrisk_system* system, const sysrisk_pipeline_options* options,
                                            char** json, char** long_csv);

#ifdef __cplusplus
}
#endif

#endif
