#pragma once

#include <cstdint>
#include <random>

namespace energyq::rng {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for replication (or sweep row) `index` of a run seeded with `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(base ^ index); }

// Per-slot random source. std::mt19937_64 output is fixed by the standard;
// draws are converted by hand because the <random> distributions are not
// reproducible across standard libraries.
class SlotRng {
public:
  static constexpr const char* kGenerator = "mt19937_64";

  explicit SlotRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // True with probability p; exact at p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
};

}  // namespace energyq::rng
