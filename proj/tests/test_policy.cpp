#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sandwich/errors.hpp"
#include "sandwich/game.hpp"
#include "sandwich/policy.hpp"

using namespace sandwich;

namespace {

// g is constant on [v_k, v_{k+1}) between sorted distinct window values, so
// the smallest s >= g(s) is max(left edge, level) on the first segment where
// that point still lies inside the segment.
double oracle_failure_bound(const std::vector<double>& window, double ratio, double cap) {
  std::vector<double> edges{0.0};
  for (double v : window) {
    if (v > 0.0 && v < cap) edges.push_back(v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges.push_back(cap);
  const double n = static_cast<double>(window.size());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double left = edges[k];
    std::size_t above = 0;
    double sum = 0.0;
    for (double v : window) {
      if (v > left) {
        ++above;
        sum += v;
      }
    }
    double level;
    if (above == 0) {
      level = 0.0;
    } else if (above == window.size()) {
      level = std::numeric_limits<double>::infinity();
    } else {
      const double p = above / n;
      level = p / (1 - p) * (ratio + sum / above);
    }
    const double cand = std::max(left, level);
    if (cand < edges[k + 1]) return cand;
  }
  return cap;
}

SlippageHistory history_of(std::vector<double> values) {
  std::vector<std::int64_t> blocks(values.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = static_cast<std::int64_t>(i);
  return SlippageHistory("P", 1000.0, blocks, std::move(values));
}

TradeIntent intent_for(double output_y, double base_fee_y) {
  const PoolState pool{25000, 5e7, 0.003, 0};
  return TradeIntent{swap_input_for_output(pool, output_y), 1.0, base_fee_y, pool};
}

}  // namespace

TEST_CASE("failure-cost bound matches the segment oracle") {
  std::mt19937_64 rng(8);
  PolicyParams params;
  for (int rep = 0; rep < 400; ++rep) {
    const double scale = oracle::log_uniform(rng, 1e-6, 1e-2);
    std::normal_distribution<double> nd(0.0, scale);
    std::vector<double> w(50 + rep % 200);
    for (auto& x : w) x = nd(rng);
    if (rep % 5 == 0) {
      for (std::size_t i = 0; i < w.size(); i += 3) w[i] = 0.0;  // quiet blocks
    }
    const double ratio = oracle::log_uniform(rng, 1e-6, 1e-1);
    const FailureCostSolution sol = solve_failure_cost_bound(w, ratio, params);
    const double want = oracle_failure_bound(w, ratio, 1.0 - params.epsilon);
    CHECK(sol.value == doctest::Approx(want).epsilon(1e-12).scale(0));
    CHECK(std::abs(sol.value - want) <= 1e-9);
    // Fixed-point property.
    CHECK(sol.value >= failure_cost_rhs(w, sol.value, ratio) - 1e-15);
  }
}

TEST_CASE("failure-cost bound special cases") {
  PolicyParams params;
  const std::vector<double> zeros(100, 0.0);
  CHECK(solve_failure_cost_bound(zeros, 0.01, params).value == 0.0);
  // Every observation adverse and above any s < 1: no crossing.
  const std::vector<double> all_bad(100, 0.9999999);
  const FailureCostSolution sol = solve_failure_cost_bound(all_bad, 0.01, params);
  CHECK(sol.pathological);
  CHECK(sol.value == 1.0 - params.epsilon);
  CHECK(std::isinf(failure_cost_rhs(all_bad, 0.5, 0.01)));
}

TEST_CASE("quiet history: attack-free with s = s_a - epsilon") {
  const SlippageHistory h = history_of(std::vector<double>(2000, 0.0));
  const TradeIntent t = intent_for(1000.0, 4.0);
  PolicyParams params;
  const SlippageAdvice a = choose_slippage(t, h, 2000, params);
  CHECK(a.regime == Regime::attack_free);
  CHECK(a.s_r == 0.0);
  CHECK(a.s_a == doctest::Approx(8.0 / 1000.0).epsilon(1e-12));
  CHECK(a.chosen == doctest::Approx(a.s_a - params.epsilon).epsilon(1e-12));
  CHECK_FALSE(a.low_confidence);
  TradeIntent chosen = t;
  chosen.slippage = a.chosen;
  CHECK_FALSE(is_attackable(chosen));
}

TEST_CASE("volatile history with a small trade is unavoidable") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 0.01);
  std::vector<double> v(2000);
  for (auto& x : v) x = nd(rng);
  const SlippageHistory h = history_of(v);
  // Large trade relative to the base fee: s_a is tiny, the history is noisy.
  const TradeIntent t = intent_for(1e6, 4.0);
  const SlippageAdvice a = choose_slippage(t, h, 2000, PolicyParams{});
  CHECK(a.regime == Regime::unavoidable);
  CHECK(a.chosen == a.s_r);
  CHECK(a.s_r >= a.s_a);
  CHECK(a.failure_prob == doctest::Approx(failure_probability_of(h.window_before(2000), a.chosen)));
}

TEST_CASE("attack-free regime keeps the larger of s_a - eps and s_r") {
  std::vector<double> v(2000, 0.0);
  for (std::size_t i = 0; i < v.size(); i += 20) v[i] = 1e-4;
  const SlippageHistory h = history_of(v);
  const TradeIntent t = intent_for(1000.0, 4.0);
  const SlippageAdvice a = choose_slippage(t, h, 2000, PolicyParams{});
  CHECK(a.regime == Regime::attack_free);
  CHECK(a.chosen == std::max(a.s_a - 1e-6, a.s_r));
}

TEST_CASE("short history is rejected or flagged") {
  const TradeIntent t = intent_for(1000.0, 4.0);
  const SlippageHistory h = history_of(std::vector<double>(30, 0.0));
  CHECK_THROWS_AS(choose_slippage(t, h, 5, PolicyParams{}), NotEnoughDataError);
  const SlippageAdvice a = choose_slippage(t, h, 30, PolicyParams{});
  CHECK(a.low_confidence);
  CHECK(a.observations == 30);
}

TEST_CASE("parameter validation") {
  PolicyParams p;
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = PolicyParams{};
  p.failed_tx_gas_fraction = -1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(to_string(Regime::attack_free) == "ATTACK_FREE");
  CHECK(to_string(Regime::unavoidable) == "UNAVOIDABLE");
}

TEST_CASE("attack-free bound is capped at one") {
  CHECK(attack_free_bound(intent_for(1.0, 4.0)) == 1.0);
}
