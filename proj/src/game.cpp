#include "sandwich/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sandwich/errors.hpp"

namespace sandwich {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio

// Golden-section maximization of a unimodal f on [lo, hi].
template <class F>
double golden_maximize(F&& f, double lo, double hi, double rel_tol, int max_iter) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter; ++i) {
    if (hi - lo <= rel_tol * std::abs(hi)) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

void require_victim_input(double victim_input_x) {
  if (!(victim_input_x > 0.0) || !std::isfinite(victim_input_x)) {
    throw DomainError("victim input must be positive");
  }
}

// Sign of dProfit/da equals the sign of A a^2 + B a + C.
struct DerivativeNumerator {
  double a2, a1, a0;
};

DerivativeNumerator derivative_numerator(double x0, double d, double f) {
  const double g = 1.0 - f;
  const double g2 = g * g;
  return {
      f * (d * g2 - (2.0 - f) * x0),
      2.0 * x0 * (d * g2 - (2.0 - f) * f * x0),
      x0 * (d * d * g2 * g + d * (2.0 - f) * g2 * x0 - (2.0 - f) * f * x0 * x0),
  };
}

// Closed-form location of the profit maximum, or throws.
double unconstrained_seed(const PoolState& pool, double d) {
  const double x0 = pool.reserve_x;
  const auto [qa, qb, qc] = derivative_numerator(x0, d, pool.fee);
  if (qc <= 0.0 && qa <= 0.0 && qb <= 0.0) {
    throw NoInteriorOptimumError("sandwich profit is decreasing from zero input; no profitable attack");
  }
  if (qa == 0.0) {
    if (qb < 0.0 && qc > 0.0) return -qc / qb;
    if (qc <= 0.0 && qb <= 0.0) throw NoInteriorOptimumError("no interior optimum");
    throw UnboundedOptimumError("sandwich profit increases without bound");
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    if (qa < 0.0) throw NoInteriorOptimumError("negative discriminant: profit has no interior optimum");
    throw UnboundedOptimumError("sandwich profit increases without bound");
  }
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  double r1 = q / qa;
  double r2 = q != 0.0 ? qc / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (qa < 0.0) {
    // Numerator positive between the roots: the maximum is at r2.
    if (!(r2 > 0.0)) throw NoInteriorOptimumError("profit has no interior optimum for positive input");
    return r2;
  }
  // qa > 0: a local maximum at r1, but profit rises again past r2.
  if (r1 > 0.0) {
    const double far = 1e6 * (x0 + d) + 1e6 * r2;
    if (gross_attack_profit(pool, d, r1) >= gross_attack_profit(pool, d, far)) return r1;
  }
  throw UnboundedOptimumError("sandwich profit increases towards its supremum at infinite input");
}

// Exact root of the executed-boundary condition for the simulated transition:
// (1-f) a^2 + (x0 + (1-f) x0 + (1-f)^2 d) a - s/(1-s) x0 (x0 + (1-f) d) = 0
double tolerated_seed(double x0, double d, double f, double s) {
  const double g = 1.0 - f;
  const double b = x0 + g * x0 + g * g * d;
  const double c = s / (1.0 - s) * x0 * (x0 + g * d);
  return 2.0 * c / (b + std::sqrt(b * b + 4.0 * g * c));
}

// Attacker profit of the three-swap chain in closed form (independent of
// reserve_y). Both arrangements are exact; the pool's X gain is a ratio of
// positive terms, so d - gain is accurate whenever the gain is small, and
// the direct form is used otherwise.
double chain_profit(double x0, double f, double d, double a) {
  const double g = 1.0 - f;
  const double g2 = g * g;
  const double fee_sq = f * (2.0 - f);            // 1 - g^2
  const double fee_cube = f * (3.0 - f * (3.0 - f));  // 1 - g^3
  const double den = x0 * (x0 + a) + g2 * a * (x0 + a + g * d);
  const double gain = x0 * (d * x0 + a * d * fee_cube + fee_sq * a * (x0 + a)) / den;
  if (gain < 0.5 * d) return d - gain;
  const double bracket = g2 * d * (x0 + a) + g2 * g * d * (x0 + d) - fee_sq * x0 * (x0 + a);
  return a * bracket / den;
}

}  // namespace

std::string_view to_string(BindingConstraint c) {
  switch (c) {
    case BindingConstraint::unconstrained_optimum:
      return "UNCONSTRAINED_OPTIMUM";
    case BindingConstraint::slippage_bound:
      return "SLIPPAGE_BOUND";
    case BindingConstraint::no_attack:
      return "NO_ATTACK";
  }
  return "?";
}

SandwichLegs simulate_legs(const PoolState& pool, double victim_in, double attack_in) {
  require_victim_input(victim_in);
  SandwichLegs legs;
  if (attack_in == 0.0) {
    const SwapResult victim = apply_swap(pool, victim_in);
    legs.victim_output_y = victim.output;
    legs.after_frontrun = pool;
    legs.after_victim = victim.pool;
    legs.after_backrun = victim.pool;
    return legs;
  }
  if (!(attack_in > 0.0)) throw DomainError("attack input must be non-negative");

  const SwapResult front = apply_swap(pool, attack_in);
  const SwapResult victim = apply_swap(front.pool, victim_in);
  const SwapResult back = apply_swap_y(victim.pool, front.output);

  legs.frontrun_output_y = front.output;
  legs.victim_output_y = victim.output;
  legs.backrun_output_x = back.output;
  legs.gross_profit_x = chain_profit(pool.reserve_x, pool.fee, victim_in, attack_in);
  legs.after_frontrun = front.pool;
  legs.after_victim = victim.pool;
  legs.after_backrun = back.pool;
  return legs;
}

double victim_output_after_frontrun(const PoolState& pool, double victim_in, double attack_in) {
  if (attack_in == 0.0) return swap_output(pool, victim_in);
  const SwapResult front = apply_swap(pool, attack_in);
  return swap_output(front.pool, victim_in);
}

double gross_attack_profit(const PoolState& pool, double victim_in, double attack_in) {
  return simulate_legs(pool, victim_in, attack_in).gross_profit_x;
}

double optimal_unconstrained_input(const PoolState& pool, double victim_input_x) {
  pool.validate();
  require_victim_input(victim_input_x);
  if (pool.fee == 0.0) {
    throw UnboundedOptimumError(
        "fee-free pool: attack profit increases monotonically with input; use the slippage bound");
  }
  const double seed = unconstrained_seed(pool, victim_input_x);
  auto profit = [&](double a) { return gross_attack_profit(pool, victim_input_x, a); };

  double lo = 0.5 * seed;
  double hi = 2.0 * seed;
  const double at_seed = profit(seed);
  for (int i = 0; i < 60 && profit(hi) > at_seed; ++i) hi *= 2.0;
  for (int i = 0; i < 60 && profit(lo) > at_seed; ++i) lo *= 0.5;
  return golden_maximize(profit, lo, hi, 1e-13, 400);
}

double max_tolerated_input(const PoolState& pool, double victim_input_x, double s) {
  pool.validate();
  require_victim_input(victim_input_x);
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream os;
    os << "slippage must be in (0, 1) for the tolerance bound, got " << s;
    throw DomainError(os.str());
  }
  const double expected = swap_output(pool, victim_input_x);
  const double target = (1.0 - s) * expected;
  // Non-negative iff the victim still executes.
  auto slack = [&](double a) {
    return victim_output_after_frontrun(pool, victim_input_x, a) - target;
  };

  const double seed = tolerated_seed(pool.reserve_x, victim_input_x, pool.fee, s);
  double lo = 0.0;
  double hi = seed > 0.0 ? 2.0 * seed : pool.reserve_x * s;
  if (seed > 0.0 && slack(0.5 * seed) >= 0.0) lo = 0.5 * seed;
  for (int i = 0; slack(hi) >= 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
    if (i > 2000 || !std::isfinite(hi)) throw OverflowError("tolerance bound bracket overflow");
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (slack(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

AttackPlan optimal_attack(const TradeIntent& intent, double base_fee_x) {
  intent.validate();
  if (!(base_fee_x >= 0.0) || !std::isfinite(base_fee_x)) {
    throw DomainError("base_fee_x must be non-negative");
  }
  const PoolState& pool = intent.pool;
  const double d = intent.input_x;

  double input = 0.0;
  BindingConstraint binding = BindingConstraint::no_attack;
  if (intent.slippage >= 1.0) {
    try {
      input = optimal_unconstrained_input(pool, d);
    } catch (const NoInteriorOptimumError&) {
      input = 0.0;
    }
    binding = BindingConstraint::unconstrained_optimum;
  } else {
    const double bound = max_tolerated_input(pool, d, intent.slippage);
    double unconstrained = std::numeric_limits<double>::infinity();
    if (pool.fee > 0.0) {
      try {
        unconstrained = optimal_unconstrained_input(pool, d);
      } catch (const NoInteriorOptimumError&) {
        unconstrained = 0.0;
      } catch (const UnboundedOptimumError&) {
        // bound applies
      }
    }
    if (unconstrained < bound) {
      input = unconstrained;
      binding = BindingConstraint::unconstrained_optimum;
    } else {
      input = bound;
      binding = BindingConstraint::slippage_bound;
    }
  }

  AttackPlan plan;
  plan.base_fee_x = base_fee_x;
  if (!(input > 0.0)) return plan;

  SandwichLegs legs;
  try {
    legs = simulate_legs(pool, d, input);
  } catch (const DomainError&) {
    // Front-run too small to produce any output.
    return plan;
  }
  const double profit = legs.gross_profit_x - 2.0 * base_fee_x;
  if (!(profit > 0.0)) return plan;

  plan.input_x = input;
  plan.frontrun_output_y = legs.frontrun_output_y;
  plan.backrun_output_x = legs.backrun_output_x;
  plan.profit_x = profit;
  plan.binding_constraint = binding;
  return plan;
}

GameOutcome execute_sandwich(const TradeIntent& intent, const AttackPlan& plan) {
  intent.validate();
  const double expected = expected_output(intent);
  const SandwichLegs legs = simulate_legs(intent.pool, intent.input_x, plan.input_x);

  const double floor = (1.0 - intent.slippage) * expected;
  if (intent.slippage < 1.0 && legs.victim_output_y < floor * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "victim trade reverts: realized " << legs.victim_output_y << " < minimum " << floor;
    throw VictimRevertedError(os.str());
  }

  GameOutcome out;
  out.plan = plan;
  out.plan.frontrun_output_y = legs.frontrun_output_y;
  out.plan.backrun_output_x = legs.backrun_output_x;
  out.plan.profit_x =
      plan.input_x > 0.0 ? legs.gross_profit_x - 2.0 * plan.base_fee_x : 0.0;
  out.expected_y = expected;
  out.victim_realized_y = legs.victim_output_y;
  out.post_victim_pool = legs.after_victim;
  out.final_pool = legs.after_backrun;
  out.victim_loss_x = victim_loss(out);
  return out;
}

double victim_loss(const GameOutcome& outcome) {
  const double shortfall = outcome.expected_y - outcome.victim_realized_y;
  if (!(shortfall > 0.0)) return 0.0;
  return shortfall * spot_price_y_in_x(outcome.post_victim_pool);
}

bool is_attackable(const TradeIntent& intent) {
  return intent.slippage * expected_output(intent) >= 2.0 * intent.base_fee_y;
}

}  // namespace sandwich
