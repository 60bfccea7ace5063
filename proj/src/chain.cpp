#include "energyq/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "energyq/format.hpp"

namespace energyq::chain {

namespace {

// Keeps a dense-vector solve within a few hundred MB.
constexpr std::uint64_t kMaxExactCapacity = 10'000'000;

double residual_of(const TransitionMatrix& p, std::span<const double> pi) {
  const auto next = p.left_multiply(pi);
  double worst = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j) worst = std::max(worst, std::abs(next[j] - pi[j]));
  return worst;
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::size_t states)
    : down_(states, 0.0), diag_(states, 0.0), up_(states, 0.0) {
  if (states == 0) throw Error(ErrorCode::InvalidParameter, "transition matrix needs at least one state");
}

double TransitionMatrix::operator()(std::size_t i, std::size_t j) const {
  const std::size_t n = states();
  if (i >= n || j >= n) throw std::out_of_range("transition matrix index out of range");
  if (j == i) return diag_[i];
  if (j + 1 == i) return down_[i];
  if (j == i + 1) return up_[i];
  return 0.0;
}

void TransitionMatrix::set_row(std::size_t i, double down, double stay, double up) {
  const std::size_t n = states();
  if (i >= n) throw std::out_of_range("transition matrix row out of range");
  if ((i == 0 && down != 0.0) || (i + 1 == n && up != 0.0))
    throw Error(ErrorCode::InvalidParameter, "transition leaves the state space");
  down_[i] = down;
  diag_[i] = stay;
  up_[i] = up;
}

std::vector<double> TransitionMatrix::left_multiply(std::span<const double> pi) const {
  const std::size_t n = states();
  if (pi.size() != n) throw std::invalid_argument("vector length does not match state count");
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = pi[j] * diag_[j];
    if (j > 0) acc += pi[j - 1] * up_[j - 1];
    if (j + 1 < n) acc += pi[j + 1] * down_[j + 1];
    out[j] = acc;
  }
  return out;
}

double TransitionMatrix::max_row_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < states(); ++i)
    worst = std::max(worst, std::abs(down_[i] + diag_[i] + up_[i] - 1.0));
  return worst;
}

TransitionMatrix build_energy_chain(const QueueSpec& spec) {
  spec.validate();
  if (spec.capacity.is_unbounded())
    throw Error(ErrorCode::UnboundedCapacity, "the exact chain needs a finite capacity");
  const std::uint64_t c = spec.capacity.packets();
  if (c > kMaxExactCapacity)
    throw Error(ErrorCode::InvalidParameter,
                "capacity " + std::to_string(c) + " exceeds the exact-chain limit of " +
                    std::to_string(kMaxExactCapacity));

  const double d = spec.delta;
  const double mu = spec.mu_e;
  TransitionMatrix p(static_cast<std::size_t>(c) + 1);

  p.set_row(0, 0.0, 1.0 - d, d);
  for (std::size_t j = 1; j < c; ++j) p.set_row(j, mu * (1.0 - d), mu * d + (1.0 - mu) * (1.0 - d), (1.0 - mu) * d);
  p.set_row(c, mu * (1.0 - d), mu * d + (1.0 - mu), 0.0);
  return p;
}

StationaryDistribution solve_stationary(const TransitionMatrix& p, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be nonnegative");
  if (p.max_row_defect() > 1e-12) throw Error(ErrorCode::InvalidParameter, "matrix is not row-stochastic");
  const std::size_t n = p.states();

  // The empty state reaches exactly 0..m.
  std::size_t m = 0;
  while (m + 1 < n && p.up(m) > 0.0) ++m;

  StationaryDistribution out;
  out.pi.assign(n, 0.0);

  if (m == 0) {
    out.pi[0] = 1.0;
  } else {
    // Rows 0..m-1 of A = P^T - I are tridiagonal with
    //   A(i, i-1) = P(i-1, i), A(i, i) = P(i, i) - 1, A(i, i+1) = P(i+1, i);
    // row m is the normalization row of ones with right-hand side 1.
    // Eliminating state i folds its row into row i+1, after which the
    // reduced diagonal of row i+1 is minus its remaining off-diagonal mass,
    // -P(i+1, i+2). Taking the pivots in that form (Grassmann-Taksar-Heyman)
    // avoids the subtraction P(i, i) - 1. Every pivot is nonzero because
    // P(i, i+1) > 0 for i < m.
    std::vector<double> pivot(m), super(m), norm_row(m + 1, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      pivot[i] = -p.up(i);
      super[i] = p.down(i + 1);
      norm_row[i + 1] -= norm_row[i] / pivot[i] * super[i];
    }
    out.pi[m] = 1.0 / norm_row[m];
    for (std::size_t i = m; i-- > 0;) out.pi[i] = -super[i] * out.pi[i + 1] / pivot[i];
  }

  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double& v = out.pi[j];
    if (v < 0.0) {
      if (v < kNegativeClamp)
        throw Error(ErrorCode::InvalidParameter,
                    "stationary solve produced pi[" + std::to_string(j) + "] = " + format_real(v));
      v = 0.0;
    }
    total += v;
  }
  for (double& v : out.pi) v /= total;

  out.residual = residual_of(p, out.pi);
  if (out.residual > tol)
    throw NonConvergenceError("stationary residual " + format_real(out.residual) + " exceeds tolerance " +
                                  format_real(tol),
                              out.residual);
  return out;
}

StationaryDistribution solve_stationary_power(const TransitionMatrix& p, double tol, std::uint64_t max_steps) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be nonnegative");
  const std::size_t n = p.states();
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;

  double change = std::numeric_limits<double>::infinity();
  std::uint64_t step = 0;
  while (step < max_steps) {
    auto next = p.left_multiply(x);
    change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change = std::max(change, std::abs(next[j] - x[j]));
    x = std::move(next);
    ++step;
    if (change <= tol) break;
  }
  if (change > tol)
    throw NonConvergenceError("power iteration did not settle within " + std::to_string(max_steps) +
                                  " steps (last change " + format_real(change) + ")",
                              change);

  double total = 0.0;
  for (double v : x) total += v;
  for (double& v : x) v /= total;

  StationaryDistribution out;
  out.residual = residual_of(p, x);
  out.pi = std::move(x);
  out.iterations = step;
  return out;
}

double nonempty_prob(const StationaryDistribution& dist) {
  if (dist.pi.empty()) return 0.0;
  return std::clamp(1.0 - dist.pi[0], 0.0, 1.0);
}

}  // namespace energyq::chain
