#include "energyq/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <thread>

#include "energyq/rng.hpp"
#include "energyq/stats.hpp"

namespace energyq::montecarlo {

namespace {

// Energy buffer shared by both simulators. Draws exactly two uniforms per slot.
class EnergyBuffer {
public:
  explicit EnergyBuffer(const QueueSpec& spec)
      : delta_(spec.delta),
        mu_(spec.mu_e),
        limit_(spec.capacity.is_unbounded() ? std::numeric_limits<std::uint64_t>::max()
                                            : spec.capacity.packets()) {}

  std::uint64_t occupancy() const { return occupancy_; }

  void step(rng::SlotRng& rng) {
    const bool serve = rng.bernoulli(mu_);
    const bool arrive = rng.bernoulli(delta_);
    if (occupancy_ > 0 && serve) {
      --occupancy_;
      ++departed_;
    }
    if (arrive) {
      if (occupancy_ < limit_) {
        ++occupancy_;
        ++admitted_;
      } else {
        ++dropped_;
      }
    }
  }

  std::uint64_t admitted() const { return admitted_; }
  std::uint64_t departed() const { return departed_; }
  std::uint64_t dropped() const { return dropped_; }

private:
  double delta_;
  double mu_;
  std::uint64_t limit_;
  std::uint64_t occupancy_ = 0;
  std::uint64_t admitted_ = 0;
  std::uint64_t departed_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace

void SimConfig::validate() const {
  spec.validate();
  if (slots < 1) throw Error(ErrorCode::InvalidConfig, "slots must be >= 1");
  if (warmup_slots >= slots)
    throw Error(ErrorCode::InvalidConfig, "warmup slots (" + std::to_string(warmup_slots) +
                                              ") must be fewer than slots (" + std::to_string(slots) + ")");
}

std::uint64_t default_warmup(std::uint64_t slots) {
  if (slots == 0) return 0;
  return std::min<std::uint64_t>(std::max<std::uint64_t>(slots / 100, 1000), slots - 1);
}

SimResult simulate_energy_queue(const SimConfig& cfg) {
  cfg.validate();
  rng::SlotRng rng(cfg.seed);
  EnergyBuffer buffer(cfg.spec);

  SimResult out;
  out.seed = cfg.seed;
  out.generator = rng::SlotRng::kGenerator;
  out.measured_slots = cfg.slots - cfg.warmup_slots;
  stats::BatchMeans batches(out.measured_slots);

  const bool deterministic_service = cfg.spec.mu_e == 1.0;
  for (std::uint64_t t = 0; t < cfg.slots; ++t) {
    const std::uint64_t occ = buffer.occupancy();
    // With certain service the occupancy is the previous slot's arrival bit.
    assert(!deterministic_service || occ <= 1);
    (void)deterministic_service;
    out.max_occupancy_seen = std::max(out.max_occupancy_seen, occ);
    if (t >= cfg.warmup_slots) {
      if (occ >= out.histogram.size()) out.histogram.resize(occ + 1, 0);
      ++out.histogram[occ];
      batches.add(occ > 0 ? 1.0 : 0.0);
    }
    buffer.step(rng);
  }
  out.final_occupancy = buffer.occupancy();
  out.max_occupancy_seen = std::max(out.max_occupancy_seen, out.final_occupancy);
  out.admitted = buffer.admitted();
  out.departed = buffer.departed();
  out.dropped = buffer.dropped();

  const std::uint64_t empty = out.histogram.empty() ? 0 : out.histogram[0];
  out.nonempty_fraction = 1.0 - static_cast<double>(empty) / static_cast<double>(out.measured_slots);
  out.nonempty_stderr = batches.standard_error();
  return out;
}

std::vector<SimResult> simulate_replications(const SimConfig& cfg, std::size_t count, unsigned jobs) {
  cfg.validate();
  std::vector<SimResult> results(count);
  const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      SimConfig rep = cfg;
      rep.seed = rng::derive_seed(cfg.seed, i);
      results[i] = simulate_energy_queue(rep);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

GatedSourceResult simulate_gated_source(double lambda_p, double success_prob, const SimConfig& cfg,
                                        double slope_threshold) {
  require_probability(lambda_p, "lambda_p");
  require_probability(success_prob, "success_prob");
  cfg.validate();
  if (!(slope_threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "slope threshold must be positive");

  rng::SlotRng rng(cfg.seed);
  EnergyBuffer energy(cfg.spec);
  std::uint64_t queue = 0;

  GatedSourceResult out;
  out.arrival_rate = lambda_p;
  out.measured_slots = cfg.slots - cfg.warmup_slots;
  stats::LinearTrend trend;

  for (std::uint64_t t = 0; t < cfg.slots; ++t) {
    const bool measured = t >= cfg.warmup_slots;
    if (measured) trend.add(static_cast<double>(t - cfg.warmup_slots), static_cast<double>(queue));

    const bool has_energy = energy.occupancy() > 0;
    energy.step(rng);
    const bool success = rng.bernoulli(success_prob);
    const bool arrival = rng.bernoulli(lambda_p);

    if (has_energy && queue > 0 && success) {
      --queue;
      if (measured) ++out.delivered;
    }
    if (arrival) ++queue;
  }

  out.final_queue_length = queue;
  out.delivered_throughput = static_cast<double>(out.delivered) / static_cast<double>(out.measured_slots);
  out.mean_queue_length = trend.mean_y();
  out.queue_growth_slope = trend.slope();
  out.stable_verdict = out.queue_growth_slope <= slope_threshold;
  const double magnitude = std::abs(out.queue_growth_slope);
  out.borderline = magnitude >= slope_threshold / 2 && magnitude < 2 * slope_threshold;
  return out;
}

}  // namespace energyq::montecarlo
