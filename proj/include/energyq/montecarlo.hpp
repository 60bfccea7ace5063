#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "energyq/types.hpp"

namespace energyq::montecarlo {

struct SimConfig {
  QueueSpec spec;
  std::uint64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t warmup_slots = 10'000;

  // Throws Error(InvalidConfig) unless slots >= 1 and warmup_slots < slots,
  // Error(InvalidParameter) for a bad QueueSpec.
  void validate() const;
};

// 1% of slots, at least 1000, but always leaving one measured slot.
std::uint64_t default_warmup(std::uint64_t slots);

struct SimResult {
  double nonempty_fraction = 0.0;
  std::optional<double> nonempty_stderr;  // batch means, 100 batches
  std::vector<std::uint64_t> histogram;   // histogram[j] = measured slots starting at occupancy j
  std::uint64_t measured_slots = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_occupancy_seen = 0;  // over the whole run, warmup included

  // Whole-run bookkeeping: admitted - departed == final_occupancy.
  std::uint64_t admitted = 0;
  std::uint64_t departed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t final_occupancy = 0;

  std::string generator;
};

// Slot t, starting empty:
//   1. record the start-of-slot occupancy (after warmup);
//   2. a nonempty queue releases one packet with probability mu_e;
//   3. one packet arrives with probability delta and is admitted if the
//      post-service occupancy is below capacity.
// Deterministic in the config.
SimResult simulate_energy_queue(const SimConfig& cfg);

// `count` replications with seeds rng::derive_seed(cfg.seed, i), run on up to
// `jobs` threads. Output order is replication order regardless of `jobs`.
std::vector<SimResult> simulate_replications(const SimConfig& cfg, std::size_t count, unsigned jobs = 1);

inline constexpr double kDefaultSlopeThreshold = 1e-4;

struct GatedSourceResult {
  double arrival_rate = 0.0;
  double delivered_throughput = 0.0;  // packets per measured slot
  double mean_queue_length = 0.0;
  double queue_growth_slope = 0.0;    // least squares over measured slots
  bool stable_verdict = false;        // slope <= threshold
  bool borderline = false;            // threshold/2 <= |slope| < 2 * threshold
  std::uint64_t measured_slots = 0;
  std::uint64_t delivered = 0;        // measured slots only
  std::uint64_t final_queue_length = 0;
};

// A data source with Bernoulli(lambda_p) arrivals into an unbounded queue,
// gated by the energy queue of cfg: in a slot whose start finds energy
// available and data waiting, the head packet departs with probability
// success_prob. The energy queue evolves exactly as in simulate_energy_queue,
// whatever the data queue holds.
GatedSourceResult simulate_gated_source(double lambda_p, double success_prob, const SimConfig& cfg,
                                        double slope_threshold = kDefaultSlopeThreshold);

}  // namespace energyq::montecarlo
