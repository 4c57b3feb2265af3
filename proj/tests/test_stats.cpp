#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sandwich/errors.hpp"
#include "sandwich/stats.hpp"

using namespace sandwich;

namespace {

// Smallest observed value with at most floor(p n) observations strictly above it, clamped at 0.
double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const std::size_t allowed = static_cast<std::size_t>(std::floor(p * v.size() + 1e-9));
  for (double c : v) {
    std::size_t above = 0;
    for (double w : v) above += w > c;
    if (above <= allowed) return std::max(c, 0.0);
  }
  return std::max(v.back(), 0.0);
}

SlippageHistory make_history(std::vector<double> values, std::int64_t first_block = 0) {
  std::vector<std::int64_t> blocks(values.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = first_block + static_cast<std::int64_t>(i);
  return SlippageHistory("P", 100.0, blocks, std::move(values), 50);
}

}  // namespace

TEST_CASE("quantile matches the nearest-rank oracle") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e-3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t len = 100 + rep * 7;
    std::vector<double> v(len);
    for (auto& x : v) x = n(rng);
    for (double p : {0.01, 0.05, 0.1, 0.25, 0.5}) {
      CHECK(quantile_of(v, p) == oracle_quantile(v, p));
    }
  }
}

TEST_CASE("quantile edge cases") {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(quantile_of(v, 0.1) == 9.0);   // one value above
  CHECK(quantile_of(v, 0.5) == 5.0);   // five values above
  std::vector<double> zeros(20, 0.0);
  CHECK(quantile_of(zeros, 0.05) == 0.0);
  std::vector<double> neg(20, -1.0);
  CHECK(quantile_of(neg, 0.05) == 0.0);
  CHECK_THROWS_AS(quantile_of(std::vector<double>(9, 1.0), 0.5), NotEnoughDataError);
  CHECK_THROWS_AS(quantile_of(std::vector<double>(50, 1.0), 0.01), NotEnoughDataError);
  CHECK_THROWS_AS(quantile_of(v, 0.0), DomainError);
  CHECK_THROWS_AS(quantile_of(v, 1.0), DomainError);
}

TEST_CASE("failure probability and tail expectation") {
  std::vector<double> v{-0.1, 0.0, 0.1, 0.2, 0.3};
  CHECK(failure_probability_of(v, 0.1) == doctest::Approx(0.4));
  CHECK(failure_probability_of(v, 0.3) == 0.0);
  CHECK(tail_expectation_of(v, 0.1) == doctest::Approx(0.25));
  CHECK(tail_expectation_of(v, 0.5) == 0.0);
  CHECK_THROWS_AS(failure_probability_of(std::vector<double>{}, 0.1), NotEnoughDataError);
}

TEST_CASE("history windows look strictly back") {
  std::vector<double> v(100);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const SlippageHistory h = make_history(v, 1000);
  CHECK(h.count_before(1000) == 0);
  CHECK(h.count_before(1010) == 10);
  const auto w = h.window_before(1080);
  REQUIRE(w.size() == 50);
  CHECK(w.front() == 30.0);
  CHECK(w.back() == 79.0);
  CHECK(h.window_before(1005, 3).size() == 3);
  CHECK(h.at(1042).value() == 42.0);
  CHECK_FALSE(h.at(999).has_value());
  CHECK_THROWS_AS(SlippageHistory("P", 1, {2, 1}, {0, 0}), DomainError);
}

TEST_CASE("slippage series on constant reserves is zero") {
  std::vector<PoolState> states;
  for (int b = 0; b < 30; ++b) states.push_back(PoolState{25000, 5e7, 0.003, b});
  const auto h = block_slippage_series(states, 1000.0, [](std::int64_t) { return 1.0; });
  REQUIRE(h.size() == 29);
  for (double s : h.values()) CHECK(s == 0.0);
  CHECK(h.blocks().front() == 0);
  CHECK(h.blocks().back() == 28);
}

TEST_CASE("slippage series, hand-computed two blocks") {
  const std::vector<PoolState> states{PoolState{1000, 2000, 0.003, 5}, PoolState{1010, 1980, 0.003, 6}};
  const auto h = block_slippage_series(states, 50.0, [](std::int64_t) { return 2.0; });
  REQUIRE(h.size() == 1);
  // 25 Y wanted at block 5.
  const long double g = 0.997L;
  const long double in = 25.0L * 1000 / (g * (2000 - 25));
  const long double later = oracle::quote(1010, 1980, 0.003L, in);
  CHECK(h.values()[0] == doctest::Approx(static_cast<double>((25 - later) / 25)).epsilon(1e-9));
  CHECK(h.values()[0] > 0.0);
}

TEST_CASE("infeasible sizes are skipped, not fatal") {
  const std::vector<PoolState> states{PoolState{10, 10, 0.003, 1}, PoolState{10, 10, 0.003, 2},
                                      PoolState{10, 30, 0.003, 3}};
  const auto h = block_slippage_series(states, 20.0, [](std::int64_t) { return 1.0; });
  CHECK(h.size() == 0);
  CHECK(h.skipped().size() == 2);
}

TEST_CASE("prediction accuracy on a small series") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1e-3);
  std::vector<double> v(3000);
  for (auto& x : v) x = n(rng);
  const SlippageHistory h = make_history(v);
  const PredictionReport r = prediction_accuracy(h, 0.1, 200, 200, 3000);
  CHECK(r.evaluated == 2800);
  CHECK(r.achieved_rate == doctest::Approx(0.1).epsilon(0.25));
  double sum = 0;
  for (std::size_t i = 200; i < 3000; ++i) sum += std::abs(v[i]);
  CHECK(r.mean_abs == doctest::Approx(sum / 2800).epsilon(1e-12));
  CHECK(r.pred_mean < 0.0);
  CHECK(r.rel_error == doctest::Approx(std::abs(r.achieved_rate - 0.1) / 0.1));

  const SlippageHistory quiet = make_history(std::vector<double>(500, 0.0));
  const PredictionReport q = prediction_accuracy(quiet, 0.05, 100, 100, 500);
  CHECK(q.achieved_rate == 0.0);
  CHECK(q.pred_mean == 0.0);
  CHECK_THROWS_AS(prediction_accuracy(quiet, 0.05, 100, 600, 700), NotEnoughDataError);
}
