#pragma once

#include <string>

namespace energyq {

// printf "%.<digits>g" in the C locale. Output tables use 12 digits.
std::string format_real(double value, int significant_digits = 12);

}  // namespace energyq
