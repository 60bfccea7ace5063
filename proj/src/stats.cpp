#include "energyq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace energyq::stats {

BatchMeans::BatchMeans(std::uint64_t total_samples, std::size_t batches)
    : total_(total_samples), batches_(static_cast<std::size_t>(std::min<std::uint64_t>(batches, total_samples))) {
  if (batches == 0) throw std::invalid_argument("batch count must be positive");
  means_.reserve(batches_);
}

std::uint64_t BatchMeans::batch_end(std::size_t k) const {
  // floor((k + 1) * total / batches), split so the product cannot overflow.
  const std::uint64_t j = k + 1;
  return j * (total_ / batches_) + (j * (total_ % batches_)) / batches_;
}

void BatchMeans::add(double x) {
  if (seen_ >= total_) throw std::logic_error("more samples than announced");
  ++seen_;
  sum_ += x;
  current_sum_ += x;
  ++in_current_;
  if (seen_ == batch_end(current_)) {
    means_.push_back(current_sum_ / static_cast<double>(in_current_));
    ++current_;
    in_current_ = 0;
    current_sum_ = 0.0;
  }
}

double BatchMeans::mean() const { return seen_ == 0 ? 0.0 : sum_ / static_cast<double>(seen_); }

std::optional<double> BatchMeans::standard_error() const {
  const std::size_t b = means_.size();
  if (b < 2) return std::nullopt;
  double avg = 0.0;
  for (double m : means_) avg += m;
  avg /= static_cast<double>(b);
  double ss = 0.0;
  for (double m : means_) ss += (m - avg) * (m - avg);
  const double var = ss / static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

void LinearTrend::add(double t, double y) {
  ++n_;
  const double n = static_cast<double>(n_);
  const double dt = t - mean_t_;
  mean_t_ += dt / n;
  mean_y_ += (y - mean_y_) / n;
  m_tt_ += dt * (t - mean_t_);
  c_ty_ += dt * (y - mean_y_);
}

double LinearTrend::slope() const { return m_tt_ > 0.0 ? c_ty_ / m_tt_ : 0.0; }

}  // namespace energyq::stats
