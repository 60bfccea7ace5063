#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace energyq {

enum class ErrorCode {
  InvalidParameter,
  UnboundedCapacity,
  NonConvergence,
  InvalidConfig,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Raised by the stationary solvers; carries the residual that was achieved.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(ErrorCode::NonConvergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// Buffer capacity in packets: a positive count or unbounded.
class Capacity {
public:
  static constexpr Capacity finite(std::uint64_t packets) { return Capacity(packets, false); }
  static constexpr Capacity unbounded() { return Capacity(0, true); }

  constexpr bool is_unbounded() const { return unbounded_; }
  constexpr bool is_finite() const { return !unbounded_; }

  // Only meaningful when finite.
  std::uint64_t packets() const {
    if (unbounded_) throw Error(ErrorCode::UnboundedCapacity, "capacity is unbounded");
    return packets_;
  }

  // "inf" or the decimal packet count.
  std::string to_string() const;

  // Accepts "inf" or a positive decimal integer.
  static Capacity parse(const std::string& text);

  friend constexpr bool operator==(const Capacity& a, const Capacity& b) {
    return a.unbounded_ == b.unbounded_ && (a.unbounded_ || a.packets_ == b.packets_);
  }
  // Finite capacities order by size; unbounded sorts last.
  friend constexpr bool operator<(const Capacity& a, const Capacity& b) {
    if (a.unbounded_) return false;
    if (b.unbounded_) return true;
    return a.packets_ < b.packets_;
  }

private:
  constexpr Capacity(std::uint64_t packets, bool unbounded) : packets_(packets), unbounded_(unbounded) {}

  std::uint64_t packets_;
  bool unbounded_;
};

// One slotted queue: Bernoulli(delta) arrivals, per-slot service with
// probability mu_e while nonempty, buffer of `capacity` packets.
struct QueueSpec {
  double delta = 0.0;
  double mu_e = 1.0;
  Capacity capacity = Capacity::finite(1);

  // Throws Error(InvalidParameter) if a probability is outside [0,1] or the
  // finite capacity is zero.
  void validate() const;
};

// Throws Error(InvalidParameter) naming `name` unless 0 <= p <= 1.
void require_probability(double p, const char* name);

}  // namespace energyq
