#pragma once

// Constant-product market maker arithmetic. Token X is always the input of
// the "forward" direction; apply_swap_y / swap_output_y handle Y -> X.

#include <cstdint>

namespace sandwich {

struct PoolState {
  double reserve_x = 0.0;
  double reserve_y = 0.0;
  double fee = 0.003;
  std::int64_t block = 0;

  /// Throws DomainError unless reserves are positive and finite and fee is in [0, 1).
  void validate() const;
  double product() const noexcept { return reserve_x * reserve_y; }
};

/// The victim trade: sell `input_x` of X for Y with tolerance `slippage`.
struct TradeIntent {
  double input_x = 0.0;
  double slippage = 1.0;  // s = 1 means no tolerance set
  double base_fee_y = 0.0;
  PoolState pool;

  double fee() const noexcept { return pool.fee; }
  void validate() const;
};

struct SwapResult {
  PoolState pool;
  double output = 0.0;
};

/// y (1-f) d / (x + (1-f) d)
double swap_output(const PoolState& pool, double input_x);

/// Mirror of swap_output for selling Y into the pool.
double swap_output_y(const PoolState& pool, double input_y);

/// Input of X that yields exactly `output_y`. Closed form, checked against
/// the forward quote; falls back to bisection if they disagree.
double swap_input_for_output(const PoolState& pool, double output_y);

/// Bisection on the monotone forward quote. Exposed as the reference for
/// swap_input_for_output.
double bisect_input_for_output(const PoolState& pool, double output_y);

SwapResult apply_swap(const PoolState& pool, double input_x);
SwapResult apply_swap_y(const PoolState& pool, double input_y);

/// Price of one Y in X units.
double spot_price_y_in_x(const PoolState& pool);

/// delta_vy: what the victim expects at submission.
double expected_output(const TradeIntent& intent);

}  // namespace sandwich
