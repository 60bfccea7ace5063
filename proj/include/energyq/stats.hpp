#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace energyq::stats {

inline constexpr std::size_t kDefaultBatches = 100;

// Batch-means estimator for the mean of a correlated series whose length is
// known up front. Sample k goes to batch floor(k * batches / total), so batch
// sizes differ by at most one.
class BatchMeans {
public:
  BatchMeans(std::uint64_t total_samples, std::size_t batches = kDefaultBatches);

  void add(double x);

  std::uint64_t count() const { return seen_; }
  double mean() const;

  // Standard error of the overall mean from the spread of batch means.
  // Empty when fewer than two batches are complete.
  std::optional<double> standard_error() const;

private:
  std::uint64_t total_;
  std::size_t batches_;
  std::uint64_t seen_ = 0;
  double sum_ = 0.0;
  std::size_t current_ = 0;
  std::uint64_t in_current_ = 0;
  double current_sum_ = 0.0;
  std::vector<double> means_;

  std::uint64_t batch_end(std::size_t k) const;
};

// Online least-squares fit y = a + b t.
class LinearTrend {
public:
  void add(double t, double y);

  std::uint64_t count() const { return n_; }
  double mean_y() const { return mean_y_; }
  // 0 when fewer than two distinct abscissae have been seen.
  double slope() const;

private:
  std::uint64_t n_ = 0;
  double mean_t_ = 0.0;
  double mean_y_ = 0.0;
  double m_tt_ = 0.0;
  double c_ty_ = 0.0;
};

}  // namespace energyq::stats
