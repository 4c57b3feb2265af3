#include "sandwich/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sandwich/errors.hpp"
#include "sandwich/simd.hpp"

namespace sandwich {

SlippageHistory::SlippageHistory(std::string pool_id, double size_usd,
                                 std::vector<std::int64_t> blocks, std::vector<double> slippage,
                                 std::size_t window, std::vector<SkippedBlock> skipped)
    : pool_id_(std::move(pool_id)),
      size_usd_(size_usd),
      blocks_(std::move(blocks)),
      values_(std::move(slippage)),
      window_(window),
      skipped_(std::move(skipped)) {
  if (blocks_.size() != values_.size()) throw DomainError("history: blocks and values differ in length");
  if (window_ == 0) throw DomainError("history: window must be positive");
  for (std::size_t i = 1; i < blocks_.size(); ++i) {
    if (blocks_[i] <= blocks_[i - 1]) {
      std::ostringstream os;
      os << "history: blocks must be strictly increasing (block " << blocks_[i] << " after "
         << blocks_[i - 1] << ")";
      throw DomainError(os.str());
    }
  }
}

std::size_t SlippageHistory::count_before(std::int64_t at_block) const {
  return static_cast<std::size_t>(std::lower_bound(blocks_.begin(), blocks_.end(), at_block) -
                                  blocks_.begin());
}

std::span<const double> SlippageHistory::window_before(std::int64_t at_block,
                                                       std::size_t w) const {
  const std::size_t end = count_before(at_block);
  const std::size_t begin = end > w ? end - w : 0;
  return std::span<const double>(values_).subspan(begin, end - begin);
}

std::optional<double> SlippageHistory::at(std::int64_t block) const {
  const auto it = std::lower_bound(blocks_.begin(), blocks_.end(), block);
  if (it == blocks_.end() || *it != block) return std::nullopt;
  return values_[static_cast<std::size_t>(it - blocks_.begin())];
}

SlippageHistory block_slippage_series(std::span<const PoolState> states, double trade_output_usd,
                                      const UsdPriceFn& usd_price_y, std::size_t window,
                                      const std::string& pool_id) {
  if (states.size() < 2) throw NotEnoughDataError("slippage series needs at least two pool states");
  if (!(trade_output_usd > 0.0)) throw DomainError("trade size must be positive");

  const std::size_t pairs = states.size() - 1;
  std::vector<std::int64_t> blocks;
  std::vector<double> x_now, y_now, x_next, y_next, input;
  std::vector<SkippedBlock> skipped;
  blocks.reserve(pairs);
  input.reserve(pairs);
  bool uniform_fee = true;
  for (std::size_t i = 0; i < pairs; ++i) {
    const PoolState& now = states[i];
    const PoolState& next = states[i + 1];
    if (next.block <= now.block) throw DomainError("pool states must be ordered by block");
    if (now.fee != states[0].fee || next.fee != states[0].fee) uniform_fee = false;

    const double target = trade_output_usd / usd_price_y(now.block);
    if (!(target < now.reserve_y)) {
      std::ostringstream os;
      os << "trade output " << target << " Y exceeds reserve " << now.reserve_y;
      skipped.push_back({now.block, os.str()});
      continue;
    }
    blocks.push_back(now.block);
    input.push_back(swap_input_for_output(now, target));
    x_now.push_back(now.reserve_x);
    y_now.push_back(now.reserve_y);
    x_next.push_back(next.reserve_x);
    y_next.push_back(next.reserve_y);
  }

  const std::size_t n = blocks.size();
  std::vector<double> quoted(n), realized(n);
  if (uniform_fee) {
    simd::swap_output_batch(x_now, y_now, input, states[0].fee, quoted);
    simd::swap_output_batch(x_next, y_next, input, states[0].fee, realized);
  } else {
    for (std::size_t i = 0, j = 0; i < pairs && j < n; ++i) {
      if (states[i].block != blocks[j]) continue;
      quoted[j] = swap_output(states[i], input[j]);
      realized[j] = swap_output(states[i + 1], input[j]);
      ++j;
    }
  }

  std::vector<double> slippage(n);
  for (std::size_t i = 0; i < n; ++i) slippage[i] = (quoted[i] - realized[i]) / quoted[i];
  return SlippageHistory(pool_id, trade_output_usd, std::move(blocks), std::move(slippage), window,
                         std::move(skipped));
}

double quantile_of(std::span<const double> window, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must be in (0, 1)");
  const std::size_t n = window.size();
  const auto needed = static_cast<std::size_t>(std::max(10.0, std::ceil(1.0 / p - 1e-9)));
  if (n < needed) {
    std::ostringstream os;
    os << "quantile at p=" << p << " needs " << needed << " observations, window has " << n;
    throw NotEnoughDataError(os.str());
  }
  // At most `allowed` observations may lie strictly above the answer.
  const auto allowed = std::min(n - 1, static_cast<std::size_t>(std::floor(p * n * (1.0 + 1e-12))));
  std::vector<double> sorted(window.begin(), window.end());
  const auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(n - 1 - allowed);
  std::nth_element(sorted.begin(), kth, sorted.end());
  return std::max(0.0, *kth);
}

double failure_probability_of(std::span<const double> window, double s) {
  if (window.empty()) throw NotEnoughDataError("failure probability: empty window");
  return static_cast<double>(simd::tail_stats(window, s).count) /
         static_cast<double>(window.size());
}

double tail_expectation_of(std::span<const double> window, double s) {
  if (window.empty()) throw NotEnoughDataError("tail expectation: empty window");
  const simd::TailStats t = simd::tail_stats(window, s);
  return t.count == 0 ? 0.0 : t.sum / static_cast<double>(t.count);
}

double quantile_slippage(const SlippageHistory& history, std::int64_t at_block, double p) {
  return quantile_of(history.window_before(at_block), p);
}

double failure_probability(const SlippageHistory& history, std::int64_t at_block, double s) {
  return failure_probability_of(history.window_before(at_block), s);
}

double tail_expectation(const SlippageHistory& history, std::int64_t at_block, double s) {
  return tail_expectation_of(history.window_before(at_block), s);
}

PredictionReport prediction_accuracy(const SlippageHistory& history, double p, std::size_t w,
                                     std::int64_t first_block, std::int64_t last_block) {
  if (w == 0) throw DomainError("window must be positive");
  const auto blocks = history.blocks();
  const auto values = history.values();
  const std::size_t begin = history.count_before(first_block);
  const std::size_t end = history.count_before(last_block);
  if (end <= begin) throw NotEnoughDataError("prediction range contains no observations");

  double pred_sum = 0.0, abs_sum = 0.0, abs_sq = 0.0;
  std::size_t exceed = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double pred = quantile_of(history.window_before(blocks[i], w), p);
    pred_sum += pred;
    if (values[i] > pred) ++exceed;
    const double r = std::abs(values[i]);
    abs_sum += r;
    abs_sq += r * r;
  }
  const double n = static_cast<double>(end - begin);
  PredictionReport rep;
  rep.evaluated = end - begin;
  rep.window = w;
  rep.failure_prob_target = p;
  rep.mean_abs = abs_sum / n;
  rep.vol_abs = std::sqrt(std::max(0.0, abs_sq / n - rep.mean_abs * rep.mean_abs));
  rep.pred_mean = pred_sum > 0.0 ? -(pred_sum / n) : 0.0;
  rep.achieved_rate = static_cast<double>(exceed) / n;
  rep.rel_error = std::abs(rep.achieved_rate - p) / p;
  return rep;
}

}  // namespace sandwich
