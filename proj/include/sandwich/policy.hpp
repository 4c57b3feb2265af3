#pragma once

// Trader-side slippage selection: stay below the attack-free bound when the
// expected cost of failed transactions allows it, otherwise accept the
// failure-cost bound.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "sandwich/cpmm.hpp"
#include "sandwich/stats.hpp"

namespace sandwich {

struct PolicyParams {
  double failed_tx_gas_fraction = 0.25;  // l: gas of a failed swap relative to a successful one
  double base_fee_step = 0.125;          // m: max base-fee increase per block
  double epsilon = 1e-6;                 // distance kept below the attack-free bound
  double search_tolerance = 1e-9;
  int max_search_iters = 200;
  std::size_t window = kDefaultWindow;
  std::size_t min_observations = 10;

  void validate() const;
};

enum class Regime { attack_free, unavoidable };

std::string_view to_string(Regime r);

struct SlippageAdvice {
  double chosen = 0.0;
  double s_a = 0.0;
  double s_r = 0.0;
  Regime regime = Regime::attack_free;
  double failure_prob = 0.0;     // p(chosen) on the window
  double tail_expectation = 0.0;  // E(s | s > chosen) on the window
  std::size_t observations = 0;
  bool low_confidence = false;  // window shorter than params.window
  bool pathological = false;    // no crossing below 1; s_r reported as 1 - epsilon
};

struct FailureCostSolution {
  double value = 0.0;
  bool pathological = false;
  int iterations = 0;
};

/// 2 b / delta_vy, capped at 1.
double attack_free_bound(const TradeIntent& intent);

/// g(s) = p/(1-p) ((l+m) b/delta_vy + E(s | s > s)), +inf when p = 1.
double failure_cost_rhs(std::span<const double> window, double s, double retry_fee_ratio);

/// Smallest s in [0, 1) with s >= g(s).
FailureCostSolution solve_failure_cost_bound(std::span<const double> window,
                                             double retry_fee_ratio, const PolicyParams& params);

double failure_cost_bound(const TradeIntent& intent, const SlippageHistory& history,
                          std::int64_t at_block, const PolicyParams& params);

SlippageAdvice choose_slippage(const TradeIntent& intent, const SlippageHistory& history,
                               std::int64_t at_block, const PolicyParams& params);

}  // namespace sandwich
