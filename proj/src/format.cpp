#include "energyq/format.hpp"

#include <cstdio>

namespace energyq {

std::string format_real(double value, int significant_digits) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace energyq
