#include "energyq/closedform.hpp"

#include <cmath>

namespace energyq::closedform {

namespace {

// Beyond this many terms the geometric-sum form costs more than it saves.
constexpr std::uint64_t kSumFormMaxTerms = 10'000;

void require_capacity(std::uint64_t c) {
  if (c < 1) throw Error(ErrorCode::InvalidParameter, "capacity must be >= 1");
}

// 1 - delta^n without cancellation, for delta in (0, 1).
double one_minus_pow(double delta, std::uint64_t n) {
  return -std::expm1(static_cast<double>(n) * std::log(delta));
}

// sum_{j=0..c} delta^j for delta in (0, 1).
double geometric_sum(double delta, std::uint64_t c) {
  const double tail = ipow(delta, c + 1);
  if (tail <= 0.5) return (1.0 - tail) / (1.0 - delta);
  if (c <= kSumFormMaxTerms) {
    double term = 1.0;
    double total = 1.0;
    for (std::uint64_t j = 1; j <= c; ++j) {
      term *= delta;
      total += term;
    }
    return total;
  }
  return one_minus_pow(delta, c + 1) / -std::expm1(std::log(delta));
}

}  // namespace

double ipow(double base, std::uint64_t n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1U) result *= base;
    base *= base;
    n >>= 1U;
  }
  return result;
}

Mm1cValue mm1c_nonempty(double delta, Capacity capacity) {
  require_probability(delta, "delta");
  if (capacity.is_unbounded()) return {delta, true};
  const std::uint64_t c = capacity.packets();
  require_capacity(c);

  if (delta == 0.0) return {0.0, false};
  if (delta == 1.0) return {static_cast<double>(c) / static_cast<double>(c + 1), true};

  const double tail = ipow(delta, c + 1);
  if (tail <= 0.5) return {delta * (1.0 - ipow(delta, c)) / (1.0 - tail), false};

  // delta^c close to 1: both differences cancel. The ratio of geometric sums
  // sum_{1..c} delta^j / sum_{0..c} delta^j is the same quantity.
  if (c <= kSumFormMaxTerms) {
    double term = 1.0;
    double upper = 0.0;
    for (std::uint64_t j = 1; j <= c; ++j) {
      term *= delta;
      upper += term;
    }
    return {upper / (1.0 + upper), false};
  }
  return {delta * one_minus_pow(delta, c) / one_minus_pow(delta, c + 1), false};
}

double mm1c_gap(double delta, Capacity capacity) {
  require_probability(delta, "delta");
  if (capacity.is_unbounded()) return 0.0;
  const std::uint64_t c = capacity.packets();
  require_capacity(c);
  if (delta == 0.0) return 0.0;
  if (delta == 1.0) return -1.0 / static_cast<double>(c + 1);
  return -ipow(delta, c + 1) / geometric_sum(delta, c);
}

std::vector<double> mm1c_stationary(double delta, std::uint64_t c) {
  require_probability(delta, "delta");
  require_capacity(c);
  std::vector<double> pi(c + 1);
  if (delta == 1.0) {
    for (double& v : pi) v = 1.0 / static_cast<double>(c + 1);
    return pi;
  }
  const double norm = delta == 0.0 ? 1.0 : 1.0 / geometric_sum(delta, c);
  double power = 1.0;
  for (std::uint64_t j = 0; j <= c; ++j) {
    pi[j] = norm * power;
    power *= delta;
  }
  return pi;
}

double md1c_nonempty(double delta) {
  require_probability(delta, "delta");
  return delta;
}

FormulaComparison compare(double delta, Capacity c) {
  const Mm1cValue mm1c = mm1c_nonempty(delta, c);
  FormulaComparison out;
  out.delta = delta;
  out.capacity = c;
  out.mm1c_value = mm1c.value;
  out.mm1c_is_limit = mm1c.is_limit;
  out.corrected_value = md1c_nonempty(delta);
  out.abs_error = std::abs(out.mm1c_value - out.corrected_value);
  out.signed_gap = mm1c_gap(delta, c);
  return out;
}

}  // namespace energyq::closedform
