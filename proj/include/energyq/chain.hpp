#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "energyq/types.hpp"

namespace energyq::chain {

// Row-stochastic transition matrix over occupancy states 0..c.
//
// A slot admits at most one arrival and one departure, so only the three
// central diagonals are stored; every entry with |i - j| >= 2 is zero.
class TransitionMatrix {
public:
  explicit TransitionMatrix(std::size_t states);

  std::size_t states() const { return diag_.size(); }

  // P(i, j). Zero outside the band. Throws std::out_of_range on bad indices.
  double operator()(std::size_t i, std::size_t j) const;

  double down(std::size_t i) const { return down_[i]; }  // P(i, i-1); 0 for i = 0
  double stay(std::size_t i) const { return diag_[i]; }  // P(i, i)
  double up(std::size_t i) const { return up_[i]; }      // P(i, i+1); 0 for i = c

  void set_row(std::size_t i, double down, double stay, double up);

  // pi * P, with pi sized states().
  std::vector<double> left_multiply(std::span<const double> pi) const;

  // Largest |row sum - 1| across rows.
  double max_row_defect() const;

private:
  std::vector<double> down_;
  std::vector<double> diag_;
  std::vector<double> up_;
};

struct StationaryDistribution {
  std::vector<double> pi;
  double residual = 0.0;  // max-norm of pi*P - pi at return
  std::uint64_t iterations = 0;  // 0 for the direct solver
};

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr double kNegativeClamp = -1e-14;
inline constexpr std::uint64_t kPowerIterationBudget = 1'000'000;

// Service-then-arrival slot: a nonempty queue first loses one packet with
// probability mu_e, then a packet arrives with probability delta and is
// dropped if the buffer is full after the service decision. A packet that
// arrives into an empty queue waits at least one slot.
//
// Throws Error(InvalidParameter) for bad probabilities and
// Error(UnboundedCapacity) when the capacity is not finite.
TransitionMatrix build_energy_chain(const QueueSpec& spec);

// Stationary distribution of the chain started empty.
//
// The chain is restricted to the states reachable from 0 (always a prefix
// 0..m for a banded chain), and (P^T - I) pi = 0 is solved there with the
// last balance equation replaced by sum(pi) = 1. States beyond m get 0.
// Throws NonConvergenceError when the residual exceeds `tol`, and
// Error(InvalidParameter) if an entry comes out below kNegativeClamp.
StationaryDistribution solve_stationary(const TransitionMatrix& p, double tol = kDefaultTolerance);

// Power iteration from the one-hot empty state, stopping once successive
// iterates differ by at most `tol` in max norm. Independent cross-check for
// solve_stationary; throws NonConvergenceError when the budget runs out.
StationaryDistribution solve_stationary_power(const TransitionMatrix& p, double tol = 1e-15,
                                              std::uint64_t max_steps = kPowerIterationBudget);

// 1 - pi[0], clamped to [0, 1].
double nonempty_prob(const StationaryDistribution& dist);

}  // namespace energyq::chain
