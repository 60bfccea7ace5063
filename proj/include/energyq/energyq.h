/*
 * C interface to the energyq library: exact Markov-chain analysis, closed-form
 * comparison, seeded simulation and parameter sweeps for the slotted energy
 * queue of a rechargeable transmitter.
 *
 * Every fallible call returns an eq_status. On failure a description is
 * available from eq_last_error() on the calling thread until the next call.
 * Handles are opaque, owned by the caller, and released with the matching
 * *_destroy function (which accepts NULL).
 */
#ifndef ENERGYQ_ENERGYQ_H
#define ENERGYQ_ENERGYQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ENERGYQ_BUILDING)
#    define EQ_API __declspec(dllexport)
#  else
#    define EQ_API __declspec(dllimport)
#  endif
#else
#  define EQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eq_status {
  EQ_OK = 0,
  EQ_ERR_INVALID_PARAMETER = 1,
  EQ_ERR_UNBOUNDED_CAPACITY = 2,
  EQ_ERR_NON_CONVERGENCE = 3,
  EQ_ERR_INVALID_CONFIG = 4,
  EQ_ERR_IO = 5,
  EQ_ERR_NULL_ARGUMENT = 6,
  EQ_ERR_OUT_OF_RANGE = 7,
  EQ_ERR_INTERNAL = 8
} eq_status;

/* Capacity value meaning "no buffer limit". */
#define EQ_CAPACITY_UNBOUNDED UINT64_MAX

typedef struct eq_queue_spec {
  double delta;      /* arrival probability per slot */
  double mu_e;       /* service probability per nonempty slot */
  uint64_t capacity; /* >= 1, or EQ_CAPACITY_UNBOUNDED */
} eq_queue_spec;

EQ_API const char* eq_version(void);
EQ_API const char* eq_status_name(eq_status status);
EQ_API const char* eq_last_error(void);

/* ---- exact chain ------------------------------------------------------ */

typedef struct eq_chain eq_chain;
typedef struct eq_stationary eq_stationary;

EQ_API eq_status eq_chain_build(const eq_queue_spec* spec, eq_chain** out);
EQ_API void eq_chain_destroy(eq_chain* chain);
EQ_API size_t eq_chain_states(const eq_chain* chain);
EQ_API eq_status eq_chain_entry(const eq_chain* chain, size_t from, size_t to, double* out);

/* Direct solve. On EQ_ERR_NON_CONVERGENCE, *residual_out (if given) holds
 * the residual achieved. */
EQ_API eq_status eq_chain_solve(const eq_chain* chain, double tol, eq_stationary** out, double* residual_out);
/* Power iteration from the empty state; max_steps = 0 selects 10^6. */
EQ_API eq_status eq_chain_solve_power(const eq_chain* chain, double tol, uint64_t max_steps, eq_stationary** out,
                                      double* residual_out);

EQ_API void eq_stationary_destroy(eq_stationary* dist);
EQ_API size_t eq_stationary_size(const eq_stationary* dist);
EQ_API eq_status eq_stationary_get(const eq_stationary* dist, size_t state, double* out);
EQ_API double eq_stationary_nonempty(const eq_stationary* dist);
EQ_API double eq_stationary_residual(const eq_stationary* dist);
EQ_API uint64_t eq_stationary_iterations(const eq_stationary* dist);

/* ---- closed forms ----------------------------------------------------- */

typedef struct eq_formula_comparison {
  double delta;
  uint64_t capacity;
  double mm1c_value;
  int mm1c_is_limit;
  double corrected_value;
  double abs_error;
  double signed_gap; /* mm1c minus corrected, computed without cancellation */
} eq_formula_comparison;

EQ_API eq_status eq_mm1c_nonempty(double delta, uint64_t capacity, double* out, int* is_limit);
EQ_API eq_status eq_md1c_nonempty(double delta, double* out);
EQ_API eq_status eq_compare(double delta, uint64_t capacity, eq_formula_comparison* out);

/* ---- simulation ------------------------------------------------------- */

typedef struct eq_sim_config {
  eq_queue_spec spec;
  uint64_t slots;
  uint64_t seed;
  uint64_t warmup_slots;
} eq_sim_config;

/* 1% of slots, at least 1000, always fewer than slots. */
EQ_API uint64_t eq_default_warmup(uint64_t slots);

typedef struct eq_sim_result eq_sim_result;

EQ_API eq_status eq_simulate_energy_queue(const eq_sim_config* cfg, eq_sim_result** out);
EQ_API void eq_sim_result_destroy(eq_sim_result* result);
EQ_API double eq_sim_nonempty_fraction(const eq_sim_result* result);
/* Returns 0 and leaves *out untouched when the batch-means error is undefined. */
EQ_API int eq_sim_nonempty_stderr(const eq_sim_result* result, double* out);
EQ_API uint64_t eq_sim_measured_slots(const eq_sim_result* result);
EQ_API uint64_t eq_sim_seed(const eq_sim_result* result);
EQ_API uint64_t eq_sim_max_occupancy(const eq_sim_result* result);
EQ_API uint64_t eq_sim_final_occupancy(const eq_sim_result* result);
EQ_API uint64_t eq_sim_admitted(const eq_sim_result* result);
EQ_API uint64_t eq_sim_departed(const eq_sim_result* result);
EQ_API uint64_t eq_sim_dropped(const eq_sim_result* result);
EQ_API size_t eq_sim_histogram_size(const eq_sim_result* result);
EQ_API uint64_t eq_sim_histogram_count(const eq_sim_result* result, size_t occupancy);
EQ_API const char* eq_sim_generator(const eq_sim_result* result);

typedef struct eq_gated_result {
  double arrival_rate;
  double delivered_throughput;
  double mean_queue_length;
  double queue_growth_slope;
  int stable_verdict;
  int borderline;
  uint64_t measured_slots;
  uint64_t delivered;
  uint64_t final_queue_length;
} eq_gated_result;

/* slope_threshold <= 0 selects the default 1e-4 packets/slot. */
EQ_API eq_status eq_simulate_gated_source(double lambda_p, double success_prob, const eq_sim_config* cfg,
                                          double slope_threshold, eq_gated_result* out);

/* ---- sweeps ----------------------------------------------------------- */

typedef struct eq_sweep_config eq_sweep_config;
typedef struct eq_sweep eq_sweep;

typedef enum eq_format { EQ_FORMAT_CSV = 0, EQ_FORMAT_JSON = 1 } eq_format;

EQ_API eq_status eq_sweep_config_create(eq_sweep_config** out);
/* "reproduce-comment" is the only preset. */
EQ_API eq_status eq_sweep_config_preset(const char* name, eq_sweep_config** out);
EQ_API void eq_sweep_config_destroy(eq_sweep_config* cfg);
EQ_API eq_status eq_sweep_config_clear_deltas(eq_sweep_config* cfg);
EQ_API eq_status eq_sweep_config_add_delta(eq_sweep_config* cfg, double delta);
EQ_API eq_status eq_sweep_config_clear_capacities(eq_sweep_config* cfg);
EQ_API eq_status eq_sweep_config_add_capacity(eq_sweep_config* cfg, uint64_t capacity);
EQ_API eq_status eq_sweep_config_set_mu_e(eq_sweep_config* cfg, double mu_e);
EQ_API eq_status eq_sweep_config_set_simulate(eq_sweep_config* cfg, int simulate, uint64_t slots, uint64_t base_seed);
EQ_API eq_status eq_sweep_config_set_jobs(eq_sweep_config* cfg, unsigned jobs);

typedef struct eq_sweep_row {
  double delta;
  uint64_t capacity;
  int has_exact;
  double exact_nonempty;
  double mm1c_nonempty;
  double corrected_nonempty;
  int has_mc;
  double mc_nonempty;
  int has_mc_stderr;
  double mc_stderr;
  int has_err;
  double err_mm1c_vs_exact;
  int failed; /* row-level error; message via eq_sweep_row_error */
} eq_sweep_row;

EQ_API eq_status eq_sweep_run(const eq_sweep_config* cfg, eq_sweep** out);
EQ_API void eq_sweep_destroy(eq_sweep* sweep);
EQ_API size_t eq_sweep_row_count(const eq_sweep* sweep);
EQ_API eq_status eq_sweep_get_row(const eq_sweep* sweep, size_t index, eq_sweep_row* out);
/* NULL when the row succeeded. */
EQ_API const char* eq_sweep_row_error(const eq_sweep* sweep, size_t index);

/* Renders into buf (NUL-terminated when it fits). *needed receives the
 * length excluding the terminator; call with buf = NULL to size. */
EQ_API eq_status eq_sweep_render(const eq_sweep* sweep, eq_format format, char* buf, size_t capacity, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* ENERGYQ_ENERGYQ_H */
