// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sandwich/cli.hpp"
#include "sandwich/data_io.hpp"
#include "sandwich/errors.hpp"
#include "sandwich/game.hpp"
#include "sandwich/policy.hpp"
#include "sandwich/replay.hpp"
#include "sandwich/stats.hpp"

using namespace sandwich;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Long-double bisection for the largest front-run that leaves the victim at its floor.
long double oracle_tolerated(long double x, long double y, long double f, long double d, long double s) {
  const long double floor = (1 - s) * oracle::quote(x, y, f, d);
  long double lo = 0, hi = x;
  while (oracle::sandwich(x, y, f, d, hi).victim_out >= floor) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (oracle::sandwich(x, y, f, d, mid).victim_out >= floor ? lo : hi) = mid;
  }
  return lo;
}

Verdict criterion1() {
  const TradeIntent t{10.0, 0.01, 0.0, PoolState{100, 100, 0.003, 0}};
  const AttackPlan plan = optimal_attack(t, 0.0);
  const GameOutcome out = execute_sandwich(t, plan);
  const std::pair<double, double> checks[] = {{expected_output(t), 9.066},
                                              {plan.input_x, 0.529},
                                              {plan.frontrun_output_y, 0.524},
                                              {out.victim_realized_y, 8.975},
                                              {plan.backrun_output_x, 0.635},
                                              {plan.profit_x, 0.106}};
  double worst = 0;
  for (const auto& [got, want] : checks) worst = std::max(worst, std::abs(got - want));
  return {worst <= 1e-3, "max abs deviation " + fmt("%.2e", worst) + " (tol 1e-3)"};
}

Verdict criterion2() {
  std::mt19937_64 rng(2024);
  int bad_order = 0, bad_ratio = 0;
  double worst_excess = -1;
  for (int i = 0; i < 10000; ++i) {
    const double x = oracle::log_uniform(rng, 1e2, 1e8);
    const double y = x * oracle::log_uniform(rng, 1e-3, 1e3);
    const double d = x * oracle::log_uniform(rng, 1e-4, 1);
    const double s = oracle::log_uniform(rng, 1e-4, 0.99);
    const TradeIntent t{d, s, 0.0, PoolState{x, y, 0.0, 0}};
    const GameOutcome out = execute_sandwich(t, optimal_attack(t, 0.0));
    const double p = out.plan.profit_x, lv = out.victim_loss_x;
    if (!(p <= lv)) ++bad_order;
    const double excess = p / lv - x / (d * s + x);
    worst_excess = std::max(worst_excess, excess);
    if (!(excess <= 1e-9)) ++bad_ratio;
  }
  return {bad_order == 0 && bad_ratio == 0,
          "10000 instances, P>L: " + std::to_string(bad_order) + ", ratio violations: " +
              std::to_string(bad_ratio) + ", max(P/L - bound) " + fmt("%.2e", worst_excess)};
}

Verdict criterion3() {
  std::mt19937_64 rng(7);
  int failures = 0, no_attack = 0;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double f = i % 2 ? 0.01 : 0.003;
    const double x = oracle::log_uniform(rng, 1e2, 1e8);
    const double y = x * oracle::log_uniform(rng, 1e-3, 1e3);
    const double d = x * oracle::log_uniform(rng, 1e-3, 1);
    const double s = i % 10 == 9 ? 1.0 : oracle::log_uniform(rng, 1e-4, 0.99);
    const AttackPlan plan = optimal_attack(TradeIntent{d, s, 0.0, PoolState{x, y, f, 0}}, 0.0);
    const long double hi = s < 1 ? oracle_tolerated(x, y, f, d, s) : 1e4L * x;
    const long double grid = oracle::grid_max_profit(x, y, f, d, hi * 1e-12L, hi, 100000);
    if (grid <= 0) {
      ++no_attack;
      if (plan.binding_constraint != BindingConstraint::no_attack) ++failures;
      continue;
    }
    const double rel = std::abs(plan.profit_x - static_cast<double>(grid)) / static_cast<double>(grid);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-5)) ++failures;
  }
  return {failures == 0, "1000 instances (" + std::to_string(no_attack) +
                             " unprofitable), max relative gap to 1e5-point grid " + fmt("%.2e", worst) +
                             " (tol 1e-5), failures " + std::to_string(failures)};
}

Verdict criterion4() {
  std::mt19937_64 rng(4);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double f = i % 3 == 0 ? 0.0 : (i % 3 == 1 ? 0.003 : 0.01);
    const double x = oracle::log_uniform(rng, 1e2, 1e8);
    const double y = x * oracle::log_uniform(rng, 1e-3, 1e3);
    const double d = x * oracle::log_uniform(rng, 1e-4, 1);
    const double s = oracle::log_uniform(rng, 1e-4, 0.99);
    const double a = max_tolerated_input(PoolState{x, y, f, 0}, d, s);
    const auto c = oracle::sandwich(x, y, f, d, a);
    const long double want = (1 - static_cast<long double>(s)) * oracle::quote(x, y, f, d);
    worst = std::max(worst, static_cast<double>(std::abs(c.victim_out / want - 1)));
  }
  return {worst <= 1e-9, "1000 instances, max relative deviation from (1-s) delta_vy " + fmt("%.2e", worst) +
                             " (tol 1e-9)"};
}

Verdict criterion5() {
  double lo_ratio = 2, hi_ratio = 0;
  for (double x : {1e2, 1e4, 1e6, 1e8}) {
    for (double frac : {1e-4, 1e-2, 1.0}) {
      const double d = x * frac;
      const double p = gross_attack_profit(PoolState{x, x * 0.37, 0.0, 0}, d, 1e9 * x);
      lo_ratio = std::min(lo_ratio, p / d);
      hi_ratio = std::max(hi_ratio, p / d);
    }
  }
  return {lo_ratio >= 0.999 && hi_ratio <= 1.0,
          "profit / delta_vx in [" + fmt("%.12f", lo_ratio) + ", " + fmt("%.12f", hi_ratio) + "]"};
}

Verdict criterion6() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd(0.0, 1e-3);
  const std::size_t n = 100000;
  std::vector<double> v(n);
  std::vector<std::int64_t> blocks(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = nd(rng);
    blocks[i] = static_cast<std::int64_t>(i);
  }
  const SlippageHistory h("IID", 100.0, blocks, v, 2000);
  Verdict verdict;
  for (double p : {0.01, 0.05, 0.1}) {
    const PredictionReport r = prediction_accuracy(h, p, 2000, 2000, static_cast<std::int64_t>(n));
    if (!(std::abs(r.achieved_rate - p) <= 0.02)) verdict.pass = false;
    verdict.detail += (verdict.detail.empty() ? "" : ", ") + std::string("p=") + fmt("%.2f", p) + " -> " +
                      fmt("%.4f", r.achieved_rate);
  }
  verdict.detail += " (tol 0.02, w=2000)";
  return verdict;
}

Verdict criterion7() {
  FixtureSpec spec;
  spec.blocks = 1000;
  const Dataset ds = generate_fixture(spec);
  ReplayConfig cfg;
  cfg.start_block = 1;
  cfg.end_block = 1001;
  cfg.trade_sizes_usd = {10, 100, 1000, 10000};
  const PoolReplayData pool = prepare_pool(ds, "FIXTURE", cfg);
  std::size_t cells = 0, attackable = 0, attacks = 0;
  for (double size : cfg.trade_sizes_usd) {
    for (std::int64_t b = cfg.start_block; b < cfg.end_block; ++b) {
      if (!trade_eligible(pool, size, b, cfg)) continue;
      const PoolState& st = pool.state_at(b);
      const double price = pool.usd_price_y(b);
      TradeIntent t{swap_input_for_output(st, size / price), 1.0, 4.0 / price, st};
      t.slippage = choose_slippage(t, pool.histories.at(size), b, cfg.policy_params).chosen;
      ++cells;
      if (is_attackable(t)) ++attackable;
      const double base_fee_x = t.base_fee_y * spot_price_y_in_x(st);
      if (optimal_attack(t, base_fee_x).binding_constraint != BindingConstraint::no_attack) ++attacks;
    }
  }
  const CostReport rep = run_replay(cfg, ds);
  std::size_t failures = 0;
  for (const CostRow& r : rep.rows) {
    if (r.policy == TradePolicy::ours) failures += r.failed_trades + r.abandoned_trades;
  }
  return {cells > 0 && attackable == 0 && attacks == 0 && failures == 0,
          std::to_string(cells) + " block/size cells: attackable " + std::to_string(attackable) +
              ", profitable attacks " + std::to_string(attacks) + ", failed trades " + std::to_string(failures)};
}

FixtureSpec table1_fixture() {
  FixtureSpec spec;
  spec.blocks = 5000;
  spec.seed = 42;
  spec.volatility = volatility_for_mean_abs_change(1.8e-4, spec.no_trade_prob);
  return spec;
}

Verdict criterion8() {
  const FixtureSpec spec = table1_fixture();
  const Dataset ds = generate_fixture(spec);
  Verdict v;
  int attackable_cells = 0;
  double worst_dominance = 0, worst_baseline_dev = 0, worst_ratio = INFINITY;
  for (double fee : {2.0, 4.0, 8.0}) {
    ReplayConfig cfg;
    cfg.start_block = spec.start_block;
    cfg.end_block = spec.start_block + spec.blocks;
    cfg.base_fee_usd = fee;
    const CostReport rep = run_replay(cfg, ds);
    for (std::size_t i = 0; i + 1 < rep.rows.size(); i += 2) {
      const CostRow& ours = rep.rows[i];
      const CostRow& base = rep.rows[i + 1];
      worst_dominance = std::max(worst_dominance, ours.mean_frac_cost - base.mean_frac_cost);
      if (!(ours.mean_frac_cost <= base.mean_frac_cost)) v.pass = false;
      if (base.attacked_trades > 0) {
        ++attackable_cells;
        const double dev = std::abs(base.mean_frac_cost - 0.005) / 0.005;
        worst_baseline_dev = std::max(worst_baseline_dev, dev);
        const double ratio = ours.mean_frac_cost > 0 ? base.mean_frac_cost / ours.mean_frac_cost : INFINITY;
        worst_ratio = std::min(worst_ratio, ratio);
        if (!(dev <= 0.1) || !(ratio >= 10)) v.pass = false;
      }
    }
  }
  if (attackable_cells == 0) v.pass = false;
  v.detail = "15 size/fee cells, max(ours - baseline) " + fmt("%.2e", worst_dominance) + "; " +
             std::to_string(attackable_cells) + " attackable cells, baseline within " +
             fmt("%.1f%%", 100 * worst_baseline_dev) + " of 5e-3, min baseline/ours " + fmt("%.1f", worst_ratio);
  return v;
}

Verdict criterion9() {
  const fs::path data = oracle::temp_dir("acc9");
  write_dataset(data, generate_fixture(table1_fixture()));
  std::string reports[2];
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 2; ++i) {
    const fs::path out = oracle::temp_dir("acc9_out");
    std::ostringstream sink, err;
    const int code = cli::run({"sandwich", "--data-dir", data.string(), "--format", "csv", "replay", "--out-dir",
                               out.string()},
                              sink, err);
    if (code != 0) return {false, "replay exited " + std::to_string(code) + ": " + err.str()};
    for (const char* f : {"report_costs.csv", "report_ratio.csv"}) {
      std::ifstream in(out / f, std::ios::binary);
      std::ostringstream os;
      os << in.rdbuf();
      reports[i] += os.str();
    }
  }
  const double secs = elapsed_s(t0);
  const bool same = reports[0] == reports[1] && !reports[0].empty();
  return {same && secs / 2 < 60,
          std::string(same ? "byte-identical" : "DIFFERENT") + " reports, " + fmt("%.2f", secs / 2) +
              " s per run (limit 60 s)"};
}

Verdict criterion10() {
  const int n = 20;
  const double x = 5e6;
  std::vector<std::vector<double>> profit(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    const double s = 1e-4 * std::pow(0.02 / 1e-4, i / (n - 1.0));
    for (int j = 0; j < n; ++j) {
      const double frac = 1e-4 * std::pow(0.05 / 1e-4, j / (n - 1.0));
      const TradeIntent t{x * frac, s, 0.0, PoolState{x, x, 0.003, 0}};
      profit[i][j] = optimal_attack(t, 0.0).profit_x;
    }
  }
  int violations = 0, zeros = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (profit[i][j] == 0.0) ++zeros;
      const double tol = 1e-12 * std::abs(profit[i][j]);
      if (i > 0 && profit[i][j] + tol < profit[i - 1][j]) ++violations;
      if (j > 0 && profit[i][j] + tol < profit[i][j - 1]) ++violations;
    }
  }
  // Zeros exactly on the low corner: wherever profit is 0, every smaller (s, size) is 0 too.
  bool corner = profit[0][0] == 0.0 && profit[n - 1][n - 1] > 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (profit[i][j] == 0.0 && ((i > 0 && profit[i - 1][j] != 0.0) || (j > 0 && profit[i][j - 1] != 0.0))) {
        corner = false;
      }
    }
  }
  return {violations == 0 && corner && zeros > 0,
          "20x20 grid, monotonicity violations " + std::to_string(violations) + ", zero-profit cells " +
              std::to_string(zeros) + (corner ? " (low corner)" : " (NOT a low corner)")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"worked example reproduction", criterion1},
      {"profit bounded by victim loss (fee-free)", criterion2},
      {"optimal attack equals grid-search maximum", criterion3},
      {"tolerated front-run lands on the slippage floor", criterion4},
      {"no-tolerance limit: profit tends to the victim input", criterion5},
      {"percentile predictor calibration", criterion6},
      {"quiet pool: chosen slippage is attack-free with no failures", criterion7},
      {"adaptive policy costs no more than the constant baseline", criterion8},
      {"replay determinism", criterion9},
      {"maximal profit monotone in slippage and size", criterion10},
  };
  int passed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    passed += v.pass;
    std::printf("%s criterion %2d: %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(),
                elapsed_s(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d acceptance criteria passed\n", passed, index);
  return passed == index ? 0 : 1;
}
