#include "energyq/types.hpp"

#include <charconv>
#include "energyq/format.hpp"

namespace energyq {

std::string Capacity::to_string() const {
  return unbounded_ ? std::string("inf") : std::to_string(packets_);
}

Capacity Capacity::parse(const std::string& text) {
  if (text == "inf") return unbounded();
  std::uint64_t value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || value == 0)
    throw Error(ErrorCode::InvalidParameter,
                "capacity must be a positive integer or 'inf', got '" + text + "'");
  return finite(value);
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::InvalidParameter,
                std::string(name) + " must be in [0,1], got " + format_real(p));
}

void QueueSpec::validate() const {
  require_probability(delta, "delta");
  require_probability(mu_e, "mu_e");
  if (capacity.is_finite() && capacity.packets() < 1)
    throw Error(ErrorCode::InvalidParameter, "capacity must be >= 1");
}

}  // namespace energyq
