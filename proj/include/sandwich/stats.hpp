#pragma once

// Block-level slippage statistics. Slippage values are loss-positive:
// s > 0 means the X -> Y trader received less than quoted one block earlier.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sandwich/cpmm.hpp"

namespace sandwich {

inline constexpr std::size_t kDefaultWindow = 2000;

struct SkippedBlock {
  std::int64_t block = 0;
  std::string reason;
};

/// Series of per-block fractional price changes for one pool and trade size.
/// The entry at block t compares a quote at t with the same input at t+1, so
/// it becomes observable at block t+1.
class SlippageHistory {
 public:
  SlippageHistory() = default;
  SlippageHistory(std::string pool_id, double size_usd, std::vector<std::int64_t> blocks,
                  std::vector<double> slippage, std::size_t window = kDefaultWindow,
                  std::vector<SkippedBlock> skipped = {});

  const std::string& pool_id() const noexcept { return pool_id_; }
  double size_usd() const noexcept { return size_usd_; }
  std::size_t window() const noexcept { return window_; }
  std::span<const std::int64_t> blocks() const noexcept { return blocks_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<SkippedBlock>& skipped() const noexcept { return skipped_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// The last min(w, available) observations strictly before `at_block`.
  std::span<const double> window_before(std::int64_t at_block, std::size_t w) const;
  std::span<const double> window_before(std::int64_t at_block) const {
    return window_before(at_block, window_);
  }

  /// Number of observations strictly before `at_block`.
  std::size_t count_before(std::int64_t at_block) const;

  std::optional<double> at(std::int64_t block) const;

 private:
  std::string pool_id_;
  double size_usd_ = 0.0;
  std::vector<std::int64_t> blocks_;
  std::vector<double> values_;
  std::size_t window_ = kDefaultWindow;
  std::vector<SkippedBlock> skipped_;
};

struct PredictionReport {
  double mean_abs = 0.0;   // mean |s| over the evaluation range
  double vol_abs = 0.0;    // standard deviation of |s|
  double pred_mean = 0.0;  // mean prediction, sign flipped (adverse moves negative)
  double rel_error = 0.0;  // |achieved_rate - p| / p
  double achieved_rate = 0.0;
  double failure_prob_target = 0.0;
  std::size_t window = 0;
  std::size_t evaluated = 0;
};

using UsdPriceFn = std::function<double(std::int64_t block)>;

/// Consecutive states must be one block apart. `usd_price_y` prices token Y.
SlippageHistory block_slippage_series(std::span<const PoolState> states, double trade_output_usd,
                                      const UsdPriceFn& usd_price_y,
                                      std::size_t window = kDefaultWindow,
                                      const std::string& pool_id = {});

// Window-level primitives.
double quantile_of(std::span<const double> window, double p);
double failure_probability_of(std::span<const double> window, double s);
double tail_expectation_of(std::span<const double> window, double s);

/// Nearest-rank upper quantile, clamped at 0.
double quantile_slippage(const SlippageHistory& history, std::int64_t at_block, double p);
double failure_probability(const SlippageHistory& history, std::int64_t at_block, double s);
double tail_expectation(const SlippageHistory& history, std::int64_t at_block, double s);

/// Evaluates the percentile predictor on every history entry with block in
/// [first_block, last_block).
PredictionReport prediction_accuracy(const SlippageHistory& history, double p, std::size_t w,
                                     std::int64_t first_block, std::int64_t last_block);

}  // namespace sandwich
