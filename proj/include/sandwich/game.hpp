#pragma once

// The sandwich game from the attacker's side: front-run X->Y, victim X->Y,
// back-run Y->X spending exactly the front-run output.

#include <string_view>

#include "sandwich/cpmm.hpp"

namespace sandwich {

enum class BindingConstraint { unconstrained_optimum, slippage_bound, no_attack };

std::string_view to_string(BindingConstraint c);

struct AttackPlan {
  double input_x = 0.0;            // front-run input
  double frontrun_output_y = 0.0;  // Y bought by the front-run, sold back in the back-run
  double backrun_output_x = 0.0;
  double profit_x = 0.0;  // backrun_output_x - input_x - 2 * base_fee_x
  double base_fee_x = 0.0;
  BindingConstraint binding_constraint = BindingConstraint::no_attack;
};

struct GameOutcome {
  AttackPlan plan;
  double expected_y = 0.0;         // delta_vy quoted at submission
  double victim_realized_y = 0.0;  // what the victim actually received
  double victim_loss_x = 0.0;
  PoolState post_victim_pool;  // reserves right after the victim's trade
  PoolState final_pool;        // reserves after the back-run
};

/// Reserves and flows of one simulated sandwich with front-run size `attack_in`.
/// `attack_in == 0` means no front-run or back-run.
struct SandwichLegs {
  double frontrun_output_y = 0.0;
  double victim_output_y = 0.0;
  double backrun_output_x = 0.0;
  double gross_profit_x = 0.0;  // backrun_output_x - attack_in
  PoolState after_frontrun;
  PoolState after_victim;
  PoolState after_backrun;
};

SandwichLegs simulate_legs(const PoolState& pool, double victim_in, double attack_in);

/// Victim's output after a front-run of size `attack_in`.
double victim_output_after_frontrun(const PoolState& pool, double victim_in, double attack_in);

/// delta_out(a) - a, evaluated in a cancellation-free arrangement.
double gross_attack_profit(const PoolState& pool, double victim_in, double attack_in);

/// Profit-maximizing front-run when the victim sets no tolerance (s = 1).
/// Throws UnboundedOptimumError when fee == 0 (profit increases without
/// bound in the input) and NoInteriorOptimumError when no input is profitable.
double optimal_unconstrained_input(const PoolState& pool, double victim_input_x);

/// Largest front-run that still lets the victim's trade execute at tolerance s.
double max_tolerated_input(const PoolState& pool, double victim_input_x, double s);

AttackPlan optimal_attack(const TradeIntent& intent, double base_fee_x);

/// Runs front-run, victim, back-run. Throws VictimRevertedError if the plan
/// pushes the victim below its tolerance.
GameOutcome execute_sandwich(const TradeIntent& intent, const AttackPlan& plan);

/// Victim's Y shortfall valued at the pool price right after its trade.
double victim_loss(const GameOutcome& outcome);

/// s * delta_vy >= 2 b (b in Y units).
bool is_attackable(const TradeIntent& intent);

}  // namespace sandwich
