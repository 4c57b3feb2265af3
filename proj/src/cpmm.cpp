#include "sandwich/cpmm.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "sandwich/errors.hpp"

namespace sandwich {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw DomainError(os.str());
  }
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw OverflowError(std::string(what) + ": non-finite result");
  return v;
}

// Shared by the X->Y and Y->X directions: reserves (in, out).
double quote(double reserve_in, double reserve_out, double fee, double input) {
  const double gd = (1.0 - fee) * input;
  const double out = checked((reserve_out * gd) / (reserve_in + gd), "swap output");
  if (!(out > 0.0)) throw DomainError("swap input too small: output underflows to zero");
  return out;
}

}  // namespace

void PoolState::validate() const {
  require_positive(reserve_x, "reserve_x");
  require_positive(reserve_y, "reserve_y");
  if (!(fee >= 0.0 && fee < 1.0)) {
    std::ostringstream os;
    os << "fee must be in [0, 1), got " << fee;
    throw DomainError(os.str());
  }
}

void TradeIntent::validate() const {
  pool.validate();
  require_positive(input_x, "input_x");
  if (!(slippage > 0.0 && slippage <= 1.0)) {
    std::ostringstream os;
    os << "slippage must be in (0, 1], got " << slippage;
    throw DomainError(os.str());
  }
  if (!(base_fee_y >= 0.0) || !std::isfinite(base_fee_y)) {
    throw DomainError("base_fee_y must be non-negative");
  }
}

double swap_output(const PoolState& pool, double input_x) {
  pool.validate();
  require_positive(input_x, "swap input");
  return quote(pool.reserve_x, pool.reserve_y, pool.fee, input_x);
}

double swap_output_y(const PoolState& pool, double input_y) {
  pool.validate();
  require_positive(input_y, "swap input");
  return quote(pool.reserve_y, pool.reserve_x, pool.fee, input_y);
}

double bisect_input_for_output(const PoolState& pool, double output_y) {
  pool.validate();
  require_positive(output_y, "target output");
  if (output_y >= pool.reserve_y) throw InfeasibleError("target output exceeds pool reserve_y");

  double lo = 0.0;
  double hi = pool.reserve_x;
  while (swap_output(pool, hi) < output_y) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw OverflowError("inverse quote bracket overflow");
  }
  for (int i = 0; i < 2000 && hi - lo > 0.0; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (swap_output(pool, mid) < output_y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double swap_input_for_output(const PoolState& pool, double output_y) {
  pool.validate();
  require_positive(output_y, "target output");
  if (output_y >= pool.reserve_y) throw InfeasibleError("target output exceeds pool reserve_y");

  const double g = 1.0 - pool.fee;
  const double closed = checked(output_y * pool.reserve_x / (g * (pool.reserve_y - output_y)),
                                "inverse quote");
  if (closed > 0.0) {
    const double forward = quote(pool.reserve_x, pool.reserve_y, pool.fee, closed);
    if (std::abs(forward - output_y) <= 1e-9 * output_y) return closed;
  }
  return bisect_input_for_output(pool, output_y);
}

SwapResult apply_swap(const PoolState& pool, double input_x) {
  const double out = swap_output(pool, input_x);
  const double g = 1.0 - pool.fee;
  SwapResult r;
  r.output = out;
  r.pool = pool;
  r.pool.reserve_x = pool.reserve_x + input_x;
  // Equal to reserve_y - out, without the cancellation when out ~ reserve_y.
  r.pool.reserve_y = pool.reserve_y * pool.reserve_x / (pool.reserve_x + g * input_x);
  r.pool.validate();
  return r;
}

SwapResult apply_swap_y(const PoolState& pool, double input_y) {
  const double out = swap_output_y(pool, input_y);
  const double g = 1.0 - pool.fee;
  SwapResult r;
  r.output = out;
  r.pool = pool;
  r.pool.reserve_y = pool.reserve_y + input_y;
  r.pool.reserve_x = pool.reserve_x * pool.reserve_y / (pool.reserve_y + g * input_y);
  r.pool.validate();
  return r;
}

double spot_price_y_in_x(const PoolState& pool) {
  pool.validate();
  return pool.reserve_x / pool.reserve_y;
}

double expected_output(const TradeIntent& intent) {
  return swap_output(intent.pool, intent.input_x);
}

}  // namespace sandwich
