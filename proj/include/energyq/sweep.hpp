#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "energyq/types.hpp"

namespace energyq::sweep {

struct SweepConfig {
  std::vector<double> deltas;
  std::vector<Capacity> capacities;
  double mu_e = 1.0;
  bool simulate = false;
  std::uint64_t sim_slots = 1'000'000;
  std::uint64_t base_seed = 1;
  unsigned jobs = 1;

  void validate() const;
};

// delta in {0.1, ..., 0.9, 0.95, 0.99}, c in {1, 2, 5, 10, 50}.
SweepConfig reproduce_comment_preset();

struct SweepRow {
  double delta = 0.0;
  Capacity capacity = Capacity::finite(1);
  std::optional<double> exact_nonempty;  // chain solver, finite capacity only
  double mm1c_nonempty = 0.0;
  double corrected_nonempty = 0.0;
  std::optional<double> mc_nonempty;
  std::optional<double> mc_stderr;
  std::optional<double> err_mm1c_vs_exact;  // mm1c_nonempty - exact_nonempty
  std::optional<std::string> error;         // set when this row's computation failed

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// One row per (delta, capacity) pair, ordered by delta then capacity
// (unbounded last). Row i simulates with seed rng::derive_seed(base_seed, i).
// A failure in one row is recorded in that row's `error`; the rest complete.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "delta,capacity,exact_nonempty,mm1c_nonempty,corrected_nonempty,mc_nonempty,mc_stderr,err_mm1c_vs_exact";

// Both emitters render reals with 12 significant digits and write "inf" for
// unbounded capacity. They return the number of bytes written and throw
// Error(Io) if the stream fails.
std::size_t emit_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::size_t emit_json(const std::vector<SweepRow>& rows, std::ostream& out);

std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows);

// Inverse of emit_json. Throws Error(InvalidParameter) on malformed input.
std::vector<SweepRow> parse_json(std::string_view text);

}  // namespace energyq::sweep
