#pragma once

#include <cstdint>
#include <vector>

#include "energyq/types.hpp"

namespace energyq::closedform {

struct Mm1cValue {
  double value = 0.0;
  bool is_limit = false;  // true when evaluated as a limit (delta = 1, or unbounded capacity)
};

// Nonempty probability of a continuous-time M/M/1/c queue with unit service
// rate and load delta:
//
//   delta (1 - delta^c) / (1 - delta^(c+1))
//
// At delta = 1 the expression is 0/0 and the limit c/(c+1) is returned with
// is_limit set. Unbounded capacity gives the c -> infinity limit, delta.
Mm1cValue mm1c_nonempty(double delta, Capacity c);
inline Mm1cValue mm1c_nonempty(double delta, std::uint64_t c) { return mm1c_nonempty(delta, Capacity::finite(c)); }

// mm1c_nonempty(delta, c) - md1c_nonempty(delta) evaluated without
// cancellation as -delta^(c+1) / sum_{j=0..c} delta^j. Stays representable
// (and strictly negative for delta in (0,1)) where the difference of the two
// rounded values is already zero. Unbounded capacity gives 0.
double mm1c_gap(double delta, Capacity c);

// M/M/1/c stationary vector pi_j = (1 - delta) delta^j / (1 - delta^(c+1)),
// uniform at delta = 1. Finite capacity only.
std::vector<double> mm1c_stationary(double delta, std::uint64_t c);

// Nonempty probability of the slotted queue with Bernoulli(delta) arrivals
// and one packet consumed per nonempty slot. Independent of capacity.
double md1c_nonempty(double delta);

struct FormulaComparison {
  double delta = 0.0;
  Capacity capacity = Capacity::finite(1);
  double mm1c_value = 0.0;
  bool mm1c_is_limit = false;
  double corrected_value = 0.0;
  double abs_error = 0.0;   // |mm1c_value - corrected_value| of the rounded values
  double signed_gap = 0.0;  // mm1c_gap(delta, capacity)
};

FormulaComparison compare(double delta, Capacity c);

// delta^n by repeated squaring.
double ipow(double base, std::uint64_t n);

}  // namespace energyq::closedform
