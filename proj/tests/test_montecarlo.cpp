#include <doctest.h>

#include <cmath>
#include <numeric>

#include "energyq/chain.hpp"
#include "energyq/montecarlo.hpp"
#include "energyq/rng.hpp"
#include "energyq/stats.hpp"

using namespace energyq;
using namespace energyq::montecarlo;

namespace {

SimConfig config(double delta, double mu_e, Capacity c, std::uint64_t slots, std::uint64_t seed,
                 std::uint64_t warmup = 1000) {
  SimConfig cfg;
  cfg.spec = QueueSpec{delta, mu_e, c};
  cfg.slots = slots;
  cfg.seed = seed;
  cfg.warmup_slots = warmup;
  return cfg;
}

}  // namespace

TEST_CASE("nonempty fraction at delta 0.9 matches the binomial band") {
  const auto r = simulate_energy_queue(config(0.9, 1.0, Capacity::finite(2), 1'000'000, 42));
  const double band = 4.0 * std::sqrt(0.9 * 0.1 / 1e6);
  CHECK(std::abs(r.nonempty_fraction - 0.9) <= band);
  CHECK(r.max_occupancy_seen <= 1);
  CHECK(r.generator == "mt19937_64");
  CHECK(r.seed == 42);
  CHECK(r.measured_slots == 999'000);
}

TEST_CASE("no arrivals leaves the queue empty") {
  for (double mu : {0.0, 0.5, 1.0}) {
    const auto r = simulate_energy_queue(config(0.0, mu, Capacity::finite(3), 5000, 9));
    CHECK(r.nonempty_fraction == 0.0);
    REQUIRE(r.histogram.size() == 1);
    CHECK(r.histogram[0] == r.measured_slots);
  }
}

TEST_CASE("general service rate agrees with the exact chain") {
  const QueueSpec spec{0.5, 0.5, Capacity::finite(2)};
  const double exact = chain::nonempty_prob(chain::solve_stationary(chain::build_energy_chain(spec)));
  SimConfig cfg;
  cfg.spec = spec;
  cfg.slots = 1'000'000;
  cfg.seed = 5;
  cfg.warmup_slots = default_warmup(cfg.slots);
  const auto r = simulate_energy_queue(cfg);
  REQUIRE(r.nonempty_stderr.has_value());
  CHECK(std::abs(r.nonempty_fraction - exact) <= 4.0 * *r.nonempty_stderr);
}

TEST_CASE("histogram and conservation bookkeeping") {
  for (double mu : {0.3, 0.8, 1.0}) {
    const auto r = simulate_energy_queue(config(0.6, mu, Capacity::finite(4), 200'000, 11));
    const auto total = std::accumulate(r.histogram.begin(), r.histogram.end(), std::uint64_t{0});
    CHECK(total == r.measured_slots);
    CHECK(r.nonempty_fraction == doctest::Approx(1.0 - double(r.histogram[0]) / double(r.measured_slots)));
    CHECK(r.admitted - r.departed == r.final_occupancy);
    CHECK(r.max_occupancy_seen <= 4);
    if (mu == 1.0) CHECK(r.max_occupancy_seen <= 1);
  }
}

TEST_CASE("unbounded buffer grows freely when service is slow") {
  const auto r = simulate_energy_queue(config(0.6, 0.3, Capacity::unbounded(), 20'000, 3));
  CHECK(r.dropped == 0);
  CHECK(r.admitted - r.departed == r.final_occupancy);
  CHECK(r.max_occupancy_seen > 100);
}

TEST_CASE("full buffer drops arrivals") {
  const auto r = simulate_energy_queue(config(0.9, 0.0, Capacity::finite(2), 10'000, 3));
  CHECK(r.final_occupancy == 2);
  CHECK(r.dropped > 0);
  CHECK(r.admitted == 2);
}

TEST_CASE("same config gives identical results") {
  const auto cfg = config(0.45, 0.7, Capacity::finite(6), 100'000, 77);
  const auto a = simulate_energy_queue(cfg);
  const auto b = simulate_energy_queue(cfg);
  CHECK(a.histogram == b.histogram);
  CHECK(a.nonempty_fraction == b.nonempty_fraction);
  CHECK(a.nonempty_stderr == b.nonempty_stderr);
  const auto c = simulate_energy_queue(config(0.45, 0.7, Capacity::finite(6), 100'000, 78));
  CHECK(a.histogram != c.histogram);
}

TEST_CASE("replications do not depend on thread count") {
  const auto cfg = config(0.5, 0.6, Capacity::finite(5), 50'000, 123);
  const auto serial = simulate_replications(cfg, 8, 1);
  const auto parallel = simulate_replications(cfg, 8, 4);
  REQUIRE(serial.size() == 8);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].seed == rng::derive_seed(123, i));
    CHECK(serial[i].histogram == parallel[i].histogram);
    CHECK(serial[i].nonempty_fraction == parallel[i].nonempty_fraction);
  }
}

TEST_CASE("capacity does not change the nonempty fraction at mu_e = 1") {
  for (double d : {0.2, 0.6, 0.95}) {
    for (const auto c : {Capacity::finite(1), Capacity::finite(2), Capacity::finite(10), Capacity::finite(1000),
                         Capacity::unbounded()}) {
      const auto r = simulate_energy_queue(config(d, 1.0, c, 300'000, 2024));
      REQUIRE(r.nonempty_stderr.has_value());
      CHECK(std::abs(r.nonempty_fraction - d) <= 4.0 * *r.nonempty_stderr);
      CHECK(r.max_occupancy_seen <= 1);
    }
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(simulate_energy_queue(config(0.5, 1.0, Capacity::finite(1), 0, 1, 0)), Error);
  CHECK_THROWS_AS(simulate_energy_queue(config(0.5, 1.0, Capacity::finite(1), 100, 1, 100)), Error);
  CHECK_THROWS_AS(simulate_energy_queue(config(1.5, 1.0, Capacity::finite(1), 100, 1, 0)), Error);
  CHECK_THROWS_AS(simulate_energy_queue(config(0.5, 1.0, Capacity::finite(0), 100, 1, 0)), Error);
  try {
    simulate_energy_queue(config(0.5, 1.0, Capacity::finite(1), 100, 1, 100));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
}

TEST_CASE("default warmup") {
  CHECK(default_warmup(1'000'000) == 10'000);
  CHECK(default_warmup(50'000) == 1000);
  CHECK(default_warmup(500) == 499);
  CHECK(default_warmup(1) == 0);
}

TEST_CASE("gated source below capacity is stable") {
  const auto g = simulate_gated_source(0.2, 1.0, config(0.9, 1.0, Capacity::finite(1), 1'000'000, 8));
  CHECK(g.stable_verdict);
  CHECK(std::abs(g.delivered_throughput - 0.2) <= 0.002);
  CHECK(g.arrival_rate == 0.2);
}

TEST_CASE("gated source above capacity grows at the drift rate") {
  const auto g = simulate_gated_source(0.95, 1.0, config(0.9, 1.0, Capacity::finite(1), 1'000'000, 8));
  CHECK_FALSE(g.stable_verdict);
  CHECK(std::abs(g.queue_growth_slope - 0.05) <= 0.002);
  CHECK(std::abs(g.delivered_throughput - 0.9) <= 0.002);
}

TEST_CASE("gated source without successful transmissions") {
  const auto g = simulate_gated_source(0.5, 0.0, config(0.9, 1.0, Capacity::finite(3), 100'000, 1));
  CHECK(g.delivered_throughput == 0.0);
  CHECK(g.delivered == 0);
  CHECK_FALSE(g.stable_verdict);
}

TEST_CASE("saturated throughput is delta times success probability for any capacity") {
  for (const auto c : {Capacity::finite(1), Capacity::finite(50), Capacity::unbounded()}) {
    const auto g = simulate_gated_source(1.0, 0.8, config(0.6, 1.0, c, 500'000, 31));
    CHECK(std::abs(g.delivered_throughput - 0.48) <= 0.004);
  }
}

TEST_CASE("gated source bounds and validation") {
  const auto g = simulate_gated_source(0.3, 0.7, config(0.5, 1.0, Capacity::finite(2), 200'000, 4));
  CHECK(g.delivered_throughput >= 0.0);
  CHECK(g.delivered_throughput <= 1.0);
  CHECK(g.mean_queue_length >= 0.0);
  CHECK_THROWS_AS(simulate_gated_source(1.3, 0.5, config(0.5, 1.0, Capacity::finite(2), 100, 4, 0)), Error);
  CHECK_THROWS_AS(simulate_gated_source(0.3, -0.5, config(0.5, 1.0, Capacity::finite(2), 100, 4, 0)), Error);
  CHECK_THROWS_AS(simulate_gated_source(0.3, 0.5, config(0.5, 1.0, Capacity::finite(2), 100, 4, 0), 0.0), Error);
}

TEST_CASE("borderline flag marks slopes near the threshold") {
  // Drift lambda - delta = 1e-4 sits on the default threshold.
  const auto g = simulate_gated_source(0.9001, 1.0, config(0.9, 1.0, Capacity::finite(1), 2'000'000, 12));
  const double m = std::abs(g.queue_growth_slope);
  CHECK(g.borderline == (m >= kDefaultSlopeThreshold / 2 && m < 2 * kDefaultSlopeThreshold));
  const auto far = simulate_gated_source(0.95, 1.0, config(0.9, 1.0, Capacity::finite(1), 200'000, 12));
  CHECK_FALSE(far.borderline);
}

TEST_CASE("batch means on an independent sequence") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint64_t n = 200'000;
  stats::BatchMeans bm(n);
  for (std::uint64_t i = 0; i < n; ++i) bm.add(unit(gen));
  CHECK(bm.count() == n);
  CHECK(bm.mean() == doctest::Approx(0.5).epsilon(0.01));
  // Uniform variance is 1/12; the batch estimate should land near sqrt(1/12 / n).
  const double expected = std::sqrt(1.0 / 12.0 / double(n));
  REQUIRE(bm.standard_error().has_value());
  CHECK(*bm.standard_error() == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("batch means handles short and uneven series") {
  stats::BatchMeans one(1);
  one.add(1.0);
  CHECK_FALSE(one.standard_error().has_value());
  stats::BatchMeans uneven(1050);
  for (int i = 0; i < 1050; ++i) uneven.add(i % 2);
  CHECK(uneven.mean() == doctest::Approx(0.5));
  CHECK(uneven.standard_error().has_value());
  CHECK_THROWS(uneven.add(0.0));
}

TEST_CASE("linear trend recovers an exact line") {
  stats::LinearTrend t;
  for (int i = 0; i < 1000; ++i) t.add(i, 3.0 + 0.25 * i);
  CHECK(t.slope() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t.mean_y() == doctest::Approx(3.0 + 0.25 * 499.5));
  stats::LinearTrend flat;
  flat.add(1.0, 5.0);
  CHECK(flat.slope() == 0.0);
}

TEST_CASE("uniform draws and seed derivation") {
  rng::SlotRng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  rng::SlotRng always(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(always.bernoulli(1.0));
    CHECK_FALSE(always.bernoulli(0.0));
  }
  CHECK(rng::derive_seed(5, 0) != rng::derive_seed(5, 1));
  CHECK(rng::derive_seed(5, 1) == rng::splitmix64(5 ^ 1));
  // Reference output of SplitMix64 seeded with 0.
  CHECK(rng::splitmix64(0) == 0xE220A8397B1DCDAFULL);
}
