#include "sandwich/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "sandwich/errors.hpp"
#include "sandwich/simd.hpp"

namespace sandwich {

namespace {

double retry_fee_ratio(const TradeIntent& intent, const PolicyParams& params) {
  return (params.failed_tx_gas_fraction + params.base_fee_step) * intent.base_fee_y /
         expected_output(intent);
}

std::span<const double> policy_window(const SlippageHistory& history, std::int64_t at_block,
                                      const PolicyParams& params) {
  const auto window = history.window_before(at_block, params.window);
  if (window.size() < params.min_observations || window.empty()) {
    std::ostringstream os;
    os << "slippage history for pool '" << history.pool_id() << "' has " << window.size()
       << " observations before block " << at_block << ", need "
       << std::max<std::size_t>(1, params.min_observations);
    throw NotEnoughDataError(os.str());
  }
  return window;
}

}  // namespace

void PolicyParams::validate() const {
  if (!(failed_tx_gas_fraction >= 0.0) || !(base_fee_step >= 0.0)) {
    throw DomainError("policy: l and m must be non-negative");
  }
  if (!(epsilon > 0.0 && epsilon < 0.01)) throw DomainError("policy: epsilon must be in (0, 0.01)");
  if (!(search_tolerance > 0.0)) throw DomainError("policy: search tolerance must be positive");
  if (max_search_iters <= 0) throw DomainError("policy: max_search_iters must be positive");
  if (window == 0) throw DomainError("policy: window must be positive");
}

std::string_view to_string(Regime r) {
  return r == Regime::attack_free ? "ATTACK_FREE" : "UNAVOIDABLE";
}

double attack_free_bound(const TradeIntent& intent) {
  intent.validate();
  return std::min(1.0, 2.0 * intent.base_fee_y / expected_output(intent));
}

double failure_cost_rhs(std::span<const double> window, double s, double retry_fee_ratio) {
  if (window.empty()) throw NotEnoughDataError("failure cost: empty window");
  const simd::TailStats tail = simd::tail_stats(window, s);
  if (tail.count == 0) return 0.0;
  if (tail.count == window.size()) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(window.size());
  const double p = static_cast<double>(tail.count) / n;
  const double expectation = tail.sum / static_cast<double>(tail.count);
  return p / (1.0 - p) * (retry_fee_ratio + expectation);
}

FailureCostSolution solve_failure_cost_bound(std::span<const double> window,
                                             double retry_fee_ratio, const PolicyParams& params) {
  params.validate();
  auto g = [&](double s) { return failure_cost_rhs(window, s, retry_fee_ratio); };
  auto crossed = [&](double s) { return s >= g(s); };

  FailureCostSolution sol;
  if (crossed(0.0)) return sol;

  double lo = 0.0;
  double hi = 1.0 - params.epsilon;
  if (!crossed(hi)) {
    sol.value = hi;
    sol.pathological = true;
    return sol;
  }
  while (hi - lo > params.search_tolerance) {
    if (sol.iterations >= params.max_search_iters) {
      throw SearchFailureError("failure-cost bound did not converge", lo, hi);
    }
    ++sol.iterations;
    const double mid = lo + 0.5 * (hi - lo);
    if (crossed(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  // g is a step function with jumps at the window values. Walk the segments
  // of (lo, hi]: on each, g is constant, so the first crossing is either that
  // constant or the segment's right breakpoint.
  std::vector<double> breaks;
  for (double v : window) {
    if (v > lo && v <= hi) breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());
  double cur = lo;
  std::size_t k = 0;
  while (true) {
    const double level = g(cur);
    if (cur > lo && cur >= level) {
      sol.value = cur;
      return sol;
    }
    while (k < breaks.size() && breaks[k] <= cur) ++k;
    const double next = k < breaks.size() ? breaks[k] : hi;
    if (level > cur && level < next) {
      sol.value = level;
      return sol;
    }
    if (next >= hi) break;
    cur = next;
  }
  sol.value = hi;
  return sol;
}

double failure_cost_bound(const TradeIntent& intent, const SlippageHistory& history,
                          std::int64_t at_block, const PolicyParams& params) {
  intent.validate();
  const auto window = policy_window(history, at_block, params);
  return solve_failure_cost_bound(window, retry_fee_ratio(intent, params), params).value;
}

SlippageAdvice choose_slippage(const TradeIntent& intent, const SlippageHistory& history,
                               std::int64_t at_block, const PolicyParams& params) {
  intent.validate();
  params.validate();
  const auto window = policy_window(history, at_block, params);
  const FailureCostSolution sr = solve_failure_cost_bound(window, retry_fee_ratio(intent, params), params);

  SlippageAdvice advice;
  advice.s_a = attack_free_bound(intent);
  advice.s_r = sr.value;
  advice.pathological = sr.pathological;
  advice.observations = window.size();
  advice.low_confidence = window.size() < params.window;

  if (advice.s_r < advice.s_a) {
    advice.regime = Regime::attack_free;
    advice.chosen = std::max(advice.s_a - params.epsilon, advice.s_r);
    if (!(advice.chosen > 0.0)) advice.chosen = 0.5 * advice.s_a;
  } else {
    advice.regime = Regime::unavoidable;
    advice.chosen = advice.s_r > 0.0 ? advice.s_r : params.epsilon;
  }
  advice.chosen = std::min(advice.chosen, 1.0 - params.epsilon);

  advice.failure_prob = failure_probability_of(window, advice.chosen);
  advice.tail_expectation = tail_expectation_of(window, advice.chosen);
  return advice;
}

}  // namespace sandwich
