#include "energyq/energyq.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "energyq/chain.hpp"
#include "energyq/closedform.hpp"
#include "energyq/montecarlo.hpp"
#include "energyq/sweep.hpp"

using namespace energyq;

struct eq_chain {
  chain::TransitionMatrix matrix;
};

struct eq_stationary {
  chain::StationaryDistribution dist;
};

struct eq_sim_result {
  montecarlo::SimResult result;
};

struct eq_sweep_config {
  sweep::SweepConfig cfg;
};

struct eq_sweep {
  std::vector<sweep::SweepRow> rows;
};

namespace {

thread_local std::string g_last_error;

eq_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return EQ_ERR_INVALID_PARAMETER;
    case ErrorCode::UnboundedCapacity: return EQ_ERR_UNBOUNDED_CAPACITY;
    case ErrorCode::NonConvergence: return EQ_ERR_NON_CONVERGENCE;
    case ErrorCode::InvalidConfig: return EQ_ERR_INVALID_CONFIG;
    case ErrorCode::Io: return EQ_ERR_IO;
  }
  return EQ_ERR_INTERNAL;
}

eq_status fail(eq_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
eq_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return EQ_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::out_of_range& e) {
    return fail(EQ_ERR_OUT_OF_RANGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EQ_ERR_INTERNAL, e.what());
  }
}

Capacity to_capacity(uint64_t value) {
  return value == EQ_CAPACITY_UNBOUNDED ? Capacity::unbounded() : Capacity::finite(value);
}

uint64_t from_capacity(const Capacity& c) { return c.is_unbounded() ? EQ_CAPACITY_UNBOUNDED : c.packets(); }

QueueSpec to_spec(const eq_queue_spec& s) { return QueueSpec{s.delta, s.mu_e, to_capacity(s.capacity)}; }

montecarlo::SimConfig to_sim_config(const eq_sim_config& c) {
  montecarlo::SimConfig cfg;
  cfg.spec = to_spec(c.spec);
  cfg.slots = c.slots;
  cfg.seed = c.seed;
  cfg.warmup_slots = c.warmup_slots;
  return cfg;
}

#define EQ_REQUIRE(ptr) \
  if ((ptr) == nullptr) return fail(EQ_ERR_NULL_ARGUMENT, #ptr " is null")

template <class Solver>
eq_status solve_with(const eq_chain* chain, eq_stationary** out, double* residual_out, Solver&& solver) {
  EQ_REQUIRE(chain);
  EQ_REQUIRE(out);
  *out = nullptr;
  g_last_error.clear();
  try {
    auto dist = solver(chain->matrix);
    if (residual_out) *residual_out = dist.residual;
    *out = new eq_stationary{std::move(dist)};
    return EQ_OK;
  } catch (const NonConvergenceError& e) {
    if (residual_out) *residual_out = e.residual();
    return fail(EQ_ERR_NON_CONVERGENCE, e.what());
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(EQ_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* eq_version(void) { return "1.0.0"; }

const char* eq_status_name(eq_status status) {
  switch (status) {
    case EQ_OK: return "ok";
    case EQ_ERR_INVALID_PARAMETER: return "invalid parameter";
    case EQ_ERR_UNBOUNDED_CAPACITY: return "unbounded capacity";
    case EQ_ERR_NON_CONVERGENCE: return "non-convergence";
    case EQ_ERR_INVALID_CONFIG: return "invalid config";
    case EQ_ERR_IO: return "i/o error";
    case EQ_ERR_NULL_ARGUMENT: return "null argument";
    case EQ_ERR_OUT_OF_RANGE: return "out of range";
    case EQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* eq_last_error(void) { return g_last_error.c_str(); }

// ---- chain

eq_status eq_chain_build(const eq_queue_spec* spec, eq_chain** out) {
  EQ_REQUIRE(spec);
  EQ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new eq_chain{chain::build_energy_chain(to_spec(*spec))}; });
}

void eq_chain_destroy(eq_chain* chain) { delete chain; }

size_t eq_chain_states(const eq_chain* chain) { return chain ? chain->matrix.states() : 0; }

eq_status eq_chain_entry(const eq_chain* chain, size_t from, size_t to, double* out) {
  EQ_REQUIRE(chain);
  EQ_REQUIRE(out);
  return guarded([&] { *out = chain->matrix(from, to); });
}

eq_status eq_chain_solve(const eq_chain* chain, double tol, eq_stationary** out, double* residual_out) {
  return solve_with(chain, out, residual_out,
                    [tol](const chain::TransitionMatrix& p) { return chain::solve_stationary(p, tol); });
}

eq_status eq_chain_solve_power(const eq_chain* chain, double tol, uint64_t max_steps, eq_stationary** out,
                               double* residual_out) {
  const uint64_t budget = max_steps == 0 ? chain::kPowerIterationBudget : max_steps;
  return solve_with(chain, out, residual_out, [tol, budget](const chain::TransitionMatrix& p) {
    return chain::solve_stationary_power(p, tol, budget);
  });
}

void eq_stationary_destroy(eq_stationary* dist) { delete dist; }

size_t eq_stationary_size(const eq_stationary* dist) { return dist ? dist->dist.pi.size() : 0; }

eq_status eq_stationary_get(const eq_stationary* dist, size_t state, double* out) {
  EQ_REQUIRE(dist);
  EQ_REQUIRE(out);
  if (state >= dist->dist.pi.size()) return fail(EQ_ERR_OUT_OF_RANGE, "state index out of range");
  *out = dist->dist.pi[state];
  return EQ_OK;
}

double eq_stationary_nonempty(const eq_stationary* dist) { return dist ? chain::nonempty_prob(dist->dist) : 0.0; }

double eq_stationary_residual(const eq_stationary* dist) { return dist ? dist->dist.residual : 0.0; }

uint64_t eq_stationary_iterations(const eq_stationary* dist) { return dist ? dist->dist.iterations : 0; }

// ---- closed forms

eq_status eq_mm1c_nonempty(double delta, uint64_t capacity, double* out, int* is_limit) {
  EQ_REQUIRE(out);
  return guarded([&] {
    const auto v = closedform::mm1c_nonempty(delta, to_capacity(capacity));
    *out = v.value;
    if (is_limit) *is_limit = v.is_limit ? 1 : 0;
  });
}

eq_status eq_md1c_nonempty(double delta, double* out) {
  EQ_REQUIRE(out);
  return guarded([&] { *out = closedform::md1c_nonempty(delta); });
}

eq_status eq_compare(double delta, uint64_t capacity, eq_formula_comparison* out) {
  EQ_REQUIRE(out);
  return guarded([&] {
    const auto cmp = closedform::compare(delta, to_capacity(capacity));
    out->delta = cmp.delta;
    out->capacity = from_capacity(cmp.capacity);
    out->mm1c_value = cmp.mm1c_value;
    out->mm1c_is_limit = cmp.mm1c_is_limit ? 1 : 0;
    out->corrected_value = cmp.corrected_value;
    out->abs_error = cmp.abs_error;
    out->signed_gap = cmp.signed_gap;
  });
}

// ---- simulation

uint64_t eq_default_warmup(uint64_t slots) { return montecarlo::default_warmup(slots); }

eq_status eq_simulate_energy_queue(const eq_sim_config* cfg, eq_sim_result** out) {
  EQ_REQUIRE(cfg);
  EQ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new eq_sim_result{montecarlo::simulate_energy_queue(to_sim_config(*cfg))}; });
}

void eq_sim_result_destroy(eq_sim_result* result) { delete result; }

double eq_sim_nonempty_fraction(const eq_sim_result* r) { return r ? r->result.nonempty_fraction : 0.0; }

int eq_sim_nonempty_stderr(const eq_sim_result* r, double* out) {
  if (!r || !out || !r->result.nonempty_stderr) return 0;
  *out = *r->result.nonempty_stderr;
  return 1;
}

uint64_t eq_sim_measured_slots(const eq_sim_result* r) { return r ? r->result.measured_slots : 0; }
uint64_t eq_sim_seed(const eq_sim_result* r) { return r ? r->result.seed : 0; }
uint64_t eq_sim_max_occupancy(const eq_sim_result* r) { return r ? r->result.max_occupancy_seen : 0; }
uint64_t eq_sim_final_occupancy(const eq_sim_result* r) { return r ? r->result.final_occupancy : 0; }
uint64_t eq_sim_admitted(const eq_sim_result* r) { return r ? r->result.admitted : 0; }
uint64_t eq_sim_departed(const eq_sim_result* r) { return r ? r->result.departed : 0; }
uint64_t eq_sim_dropped(const eq_sim_result* r) { return r ? r->result.dropped : 0; }
size_t eq_sim_histogram_size(const eq_sim_result* r) { return r ? r->result.histogram.size() : 0; }

uint64_t eq_sim_histogram_count(const eq_sim_result* r, size_t occupancy) {
  if (!r || occupancy >= r->result.histogram.size()) return 0;
  return r->result.histogram[occupancy];
}

const char* eq_sim_generator(const eq_sim_result* r) { return r ? r->result.generator.c_str() : ""; }

eq_status eq_simulate_gated_source(double lambda_p, double success_prob, const eq_sim_config* cfg,
                                   double slope_threshold, eq_gated_result* out) {
  EQ_REQUIRE(cfg);
  EQ_REQUIRE(out);
  return guarded([&] {
    const double threshold = slope_threshold > 0.0 ? slope_threshold : montecarlo::kDefaultSlopeThreshold;
    const auto g = montecarlo::simulate_gated_source(lambda_p, success_prob, to_sim_config(*cfg), threshold);
    out->arrival_rate = g.arrival_rate;
    out->delivered_throughput = g.delivered_throughput;
    out->mean_queue_length = g.mean_queue_length;
    out->queue_growth_slope = g.queue_growth_slope;
    out->stable_verdict = g.stable_verdict ? 1 : 0;
    out->borderline = g.borderline ? 1 : 0;
    out->measured_slots = g.measured_slots;
    out->delivered = g.delivered;
    out->final_queue_length = g.final_queue_length;
  });
}

// ---- sweeps

eq_status eq_sweep_config_create(eq_sweep_config** out) {
  EQ_REQUIRE(out);
  return guarded([&] { *out = new eq_sweep_config{}; });
}

eq_status eq_sweep_config_preset(const char* name, eq_sweep_config** out) {
  EQ_REQUIRE(name);
  EQ_REQUIRE(out);
  *out = nullptr;
  if (std::strcmp(name, "reproduce-comment") != 0)
    return fail(EQ_ERR_INVALID_CONFIG, ("unknown preset '" + std::string(name) + "'").c_str());
  return guarded([&] { *out = new eq_sweep_config{sweep::reproduce_comment_preset()}; });
}

void eq_sweep_config_destroy(eq_sweep_config* cfg) { delete cfg; }

eq_status eq_sweep_config_clear_deltas(eq_sweep_config* cfg) {
  EQ_REQUIRE(cfg);
  cfg->cfg.deltas.clear();
  return EQ_OK;
}

eq_status eq_sweep_config_add_delta(eq_sweep_config* cfg, double delta) {
  EQ_REQUIRE(cfg);
  return guarded([&] {
    require_probability(delta, "delta");
    cfg->cfg.deltas.push_back(delta);
  });
}

eq_status eq_sweep_config_clear_capacities(eq_sweep_config* cfg) {
  EQ_REQUIRE(cfg);
  cfg->cfg.capacities.clear();
  return EQ_OK;
}

eq_status eq_sweep_config_add_capacity(eq_sweep_config* cfg, uint64_t capacity) {
  EQ_REQUIRE(cfg);
  if (capacity == 0) return fail(EQ_ERR_INVALID_PARAMETER, "capacity must be >= 1");
  return guarded([&] { cfg->cfg.capacities.push_back(to_capacity(capacity)); });
}

eq_status eq_sweep_config_set_mu_e(eq_sweep_config* cfg, double mu_e) {
  EQ_REQUIRE(cfg);
  return guarded([&] {
    require_probability(mu_e, "mu_e");
    cfg->cfg.mu_e = mu_e;
  });
}

eq_status eq_sweep_config_set_simulate(eq_sweep_config* cfg, int simulate, uint64_t slots, uint64_t base_seed) {
  EQ_REQUIRE(cfg);
  if (simulate && slots == 0) return fail(EQ_ERR_INVALID_CONFIG, "simulation needs at least one slot");
  cfg->cfg.simulate = simulate != 0;
  if (slots != 0) cfg->cfg.sim_slots = slots;
  cfg->cfg.base_seed = base_seed;
  return EQ_OK;
}

eq_status eq_sweep_config_set_jobs(eq_sweep_config* cfg, unsigned jobs) {
  EQ_REQUIRE(cfg);
  cfg->cfg.jobs = jobs == 0 ? 1 : jobs;
  return EQ_OK;
}

eq_status eq_sweep_run(const eq_sweep_config* cfg, eq_sweep** out) {
  EQ_REQUIRE(cfg);
  EQ_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new eq_sweep{sweep::run_sweep(cfg->cfg)}; });
}

void eq_sweep_destroy(eq_sweep* sweep) { delete sweep; }

size_t eq_sweep_row_count(const eq_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

eq_status eq_sweep_get_row(const eq_sweep* sweep, size_t index, eq_sweep_row* out) {
  EQ_REQUIRE(sweep);
  EQ_REQUIRE(out);
  if (index >= sweep->rows.size()) return fail(EQ_ERR_OUT_OF_RANGE, "row index out of range");
  const auto& row = sweep->rows[index];
  *out = eq_sweep_row{};
  out->delta = row.delta;
  out->capacity = from_capacity(row.capacity);
  out->has_exact = row.exact_nonempty.has_value();
  out->exact_nonempty = row.exact_nonempty.value_or(0.0);
  out->mm1c_nonempty = row.mm1c_nonempty;
  out->corrected_nonempty = row.corrected_nonempty;
  out->has_mc = row.mc_nonempty.has_value();
  out->mc_nonempty = row.mc_nonempty.value_or(0.0);
  out->has_mc_stderr = row.mc_stderr.has_value();
  out->mc_stderr = row.mc_stderr.value_or(0.0);
  out->has_err = row.err_mm1c_vs_exact.has_value();
  out->err_mm1c_vs_exact = row.err_mm1c_vs_exact.value_or(0.0);
  out->failed = row.error.has_value();
  return EQ_OK;
}

const char* eq_sweep_row_error(const eq_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->rows.size() || !sweep->rows[index].error) return nullptr;
  return sweep->rows[index].error->c_str();
}

eq_status eq_sweep_render(const eq_sweep* sweep, eq_format format, char* buf, size_t capacity, size_t* needed) {
  EQ_REQUIRE(sweep);
  EQ_REQUIRE(needed);
  std::string text;
  const eq_status status = guarded([&] {
    if (format == EQ_FORMAT_CSV)
      text = sweep::to_csv(sweep->rows);
    else if (format == EQ_FORMAT_JSON)
      text = sweep::to_json(sweep->rows);
    else
      throw Error(ErrorCode::InvalidParameter, "unknown output format");
  });
  if (status != EQ_OK) return status;
  *needed = text.size();
  if (buf == nullptr) return EQ_OK;
  if (capacity < text.size() + 1) return fail(EQ_ERR_OUT_OF_RANGE, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return EQ_OK;
}

}  // extern "C"
