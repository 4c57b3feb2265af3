#include "sandwich/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sandwich/data_io.hpp"
#include "sandwich/errors.hpp"
#include "sandwich/game.hpp"
#include "sandwich/policy.hpp"
#include "sandwich/replay.hpp"
#include "sandwich/stats.hpp"

namespace sandwich::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string sci(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct Globals {
  std::string data_dir;
  std::uint64_t seed = 1;
  std::string format = "text";
  std::int64_t max_price_gap = kDefaultMaxPriceGap;

  ReportFormat report_format() const {
    return format == "csv" ? ReportFormat::csv : ReportFormat::text;
  }
};

struct PolicyFlags {
  double l = 0.25;
  double m = 0.125;
  double epsilon = 1e-6;
  std::size_t window = kDefaultWindow;
  std::size_t min_observations = 10;

  void add_to(CLI::App* sub) {
    sub->add_option("--l", l, "failed-swap gas relative to a successful swap")->capture_default_str();
    sub->add_option("--m", m, "max base-fee increase per block")->capture_default_str();
    sub->add_option("--epsilon", epsilon, "margin below the attack-free bound")->capture_default_str();
    sub->add_option("--window", window, "history window in blocks")->capture_default_str();
    sub->add_option("--min-observations", min_observations, "minimum history before advising")
        ->capture_default_str();
  }

  PolicyParams params() const {
    PolicyParams p;
    p.failed_tx_gas_fraction = l;
    p.base_fee_step = m;
    p.epsilon = epsilon;
    p.window = window;
    p.min_observations = min_observations;
    p.validate();
    return p;
  }
};

void key_values(std::ostream& out, const Globals& g,
                const std::vector<std::pair<std::string, std::string>>& kv) {
  if (g.format == "csv") {
    for (std::size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].first;
    out << "\n";
    for (std::size_t i = 0; i < kv.size(); ++i) out << (i ? "," : "") << kv[i].second;
    out << "\n";
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : kv) width = std::max(width, k.size());
  for (const auto& [k, v] : kv) out << std::left << std::setw(static_cast<int>(width + 2)) << k << v << "\n";
}

const std::string& require_data_dir(const Globals& g) {
  if (g.data_dir.empty()) throw CLI::ValidationError("--data-dir", "required for this command");
  return g.data_dir;
}

// ---- attack -------------------------------------------------------------

struct AttackArgs {
  double x = 0, y = 0, fee = kDefaultPoolFee, victim_in = 0, slippage = 1.0, base_fee_x = 0;
};

int cmd_attack(const AttackArgs& a, const Globals& g, std::ostream& out) {
  TradeIntent intent;
  intent.pool = PoolState{a.x, a.y, a.fee, 0};
  intent.input_x = a.victim_in;
  intent.slippage = a.slippage;
  intent.validate();

  const AttackPlan plan = optimal_attack(intent, a.base_fee_x);
  const double expected = expected_output(intent);
  double realized = expected;
  double loss = 0.0;
  if (plan.binding_constraint != BindingConstraint::no_attack) {
    const GameOutcome outcome = execute_sandwich(intent, plan);
    realized = outcome.victim_realized_y;
    loss = victim_loss(outcome);
  }
  key_values(out, g,
             {{"expected_output_y", num(expected)},
              {"attack_input_x", num(plan.input_x)},
              {"frontrun_output_y", num(plan.frontrun_output_y)},
              {"victim_realized_y", num(realized)},
              {"backrun_output_x", num(plan.backrun_output_x)},
              {"profit_x", num(plan.profit_x)},
              {"binding_constraint", std::string(to_string(plan.binding_constraint))},
              {"victim_loss_x", num(loss)}});
  if (plan.binding_constraint == BindingConstraint::no_attack && g.format != "csv") {
    const AttackPlan gross = optimal_attack(intent, 0.0);
    out << "no attack: best profit before fees " << num(gross.profit_x)
        << " X does not exceed two base fees " << num(2.0 * a.base_fee_x) << " X\n";
  }
  return kOk;
}

// ---- advise -------------------------------------------------------------

struct AdviseArgs {
  std::string pool;
  std::int64_t block = 0;
  double size_usd = 0;
  double base_fee_usd = 4.0;
  PolicyFlags policy;
};

int cmd_advise(const AdviseArgs& a, const Globals& g, std::ostream& out) {
  const PolicyParams params = a.policy.params();
  if (!(a.size_usd > 0.0)) throw CLI::ValidationError("--size-usd", "must be positive");
  if (!(a.base_fee_usd > 0.0)) throw CLI::ValidationError("--base-fee-usd", "must be positive");
  const Dataset ds = load_dataset(require_data_dir(g), g.max_price_gap);
  ds.pool(a.pool);

  ReplayConfig cfg;
  cfg.trade_sizes_usd = {a.size_usd};
  cfg.policy_params = params;
  const PoolReplayData data = prepare_pool(ds, a.pool, cfg);
  const PoolState& state = data.state_at(a.block);
  const double price_y = data.usd_price_y(a.block);

  TradeIntent intent;
  intent.pool = state;
  intent.input_x = swap_input_for_output(state, a.size_usd / price_y);
  intent.base_fee_y = a.base_fee_usd / price_y;
  if (data.histories.empty()) throw NotEnoughDataError("pool '" + a.pool + "' has a single state");
  const SlippageAdvice adv = choose_slippage(intent, data.histories.begin()->second, a.block, params);

  key_values(out, g,
             {{"pool", a.pool},
              {"block", std::to_string(a.block)},
              {"size_usd", num(a.size_usd)},
              {"chosen", num(adv.chosen)},
              {"s_a", num(adv.s_a)},
              {"s_r", num(adv.s_r)},
              {"regime", std::string(to_string(adv.regime))},
              {"failure_prob", num(adv.failure_prob)},
              {"tail_expectation", num(adv.tail_expectation)},
              {"observations", std::to_string(adv.observations)},
              {"low_confidence", adv.low_confidence ? "true" : "false"},
              {"pathological", adv.pathological ? "true" : "false"}});
  return kOk;
}

// ---- predict ------------------------------------------------------------

struct PredictArgs {
  std::string pool;
  std::vector<double> sizes{10.0, 100.0, 1000.0, 10000.0, 100000.0};
  std::vector<double> levels{0.01, 0.05, 0.1};
  std::vector<std::size_t> windows{100, 500, 2000};
  std::int64_t from = std::numeric_limits<std::int64_t>::min();
  std::int64_t to = std::numeric_limits<std::int64_t>::max();
};

int cmd_predict(const PredictArgs& a, const Globals& g, std::ostream& out) {
  for (double p : a.levels) {
    if (!(p > 0.0 && p < 1.0)) throw CLI::ValidationError("--p", "levels must be in (0, 1)");
  }
  for (std::size_t w : a.windows) {
    if (w == 0) throw CLI::ValidationError("--w", "windows must be positive");
  }
  if (a.to <= a.from) throw CLI::ValidationError("--to", "range is empty");
  const Dataset ds = load_dataset(require_data_dir(g), g.max_price_gap);
  ds.pool(a.pool);

  ReplayConfig cfg;
  cfg.trade_sizes_usd = a.sizes;
  const PoolReplayData data = prepare_pool(ds, a.pool, cfg);
  const std::size_t max_w = *std::max_element(a.windows.begin(), a.windows.end());

  const bool csv = g.format == "csv";
  if (csv) {
    out << "pool,size_usd,p,window,mean_abs,vol_abs,pred_mean,rel_error,achieved_rate,evaluated\n";
  } else {
    out << std::left << std::setw(10) << "size_usd" << std::right << std::setw(8) << "p"
        << std::setw(8) << "window" << std::setw(12) << "mu" << std::setw(12) << "vol"
        << std::setw(12) << "pred_mean" << std::setw(12) << "eta" << std::setw(10) << "evaluated"
        << "\n";
  }
  for (const auto& [size, history] : data.histories) {
    if (history.size() == 0) throw NotEnoughDataError("no slippage observations for size " + num(size));
    const auto blocks = history.blocks();
    // Default start: the first block with a full window behind it.
    std::int64_t from = a.from;
    if (from == std::numeric_limits<std::int64_t>::min()) {
      from = blocks[std::min(history.size() - 1, max_w)];
    }
    for (double p : a.levels) {
      for (std::size_t w : a.windows) {
        const PredictionReport rep = prediction_accuracy(history, p, w, from, a.to);
        if (csv) {
          out << a.pool << ',' << num(size) << ',' << num(p) << ',' << w << ',' << sci(rep.mean_abs)
              << ',' << sci(rep.vol_abs) << ',' << sci(rep.pred_mean) << ',' << sci(rep.rel_error)
              << ',' << sci(rep.achieved_rate) << ',' << rep.evaluated << '\n';
        } else {
          out << std::left << std::setw(10) << num(size) << std::right << std::setw(8) << num(p)
              << std::setw(8) << w << std::setw(12) << sci(rep.mean_abs) << std::setw(12)
              << sci(rep.vol_abs) << std::setw(12) << sci(rep.pred_mean) << std::setw(12)
              << sci(rep.rel_error) << std::setw(10) << rep.evaluated << "\n";
        }
      }
    }
  }
  return kOk;
}

// ---- replay -------------------------------------------------------------

struct ReplayArgs {
  std::vector<double> sizes{10.0, 100.0, 1000.0, 10000.0, 100000.0};
  std::vector<double> base_fees{4.0};
  double baseline = 0.005;
  int max_retries = 50;
  std::string out_dir = ".";
  std::int64_t from = std::numeric_limits<std::int64_t>::min();
  std::int64_t to = std::numeric_limits<std::int64_t>::max();
  bool from_set = false;
  bool to_set = false;
  PolicyFlags policy;
};

int cmd_replay(const ReplayArgs& a, const Globals& g, std::ostream& out) {
  ReplayConfig cfg;
  cfg.trade_sizes_usd = a.sizes;
  cfg.baseline_slippage = a.baseline;
  cfg.max_retries = a.max_retries;
  cfg.policy_params = a.policy.params();
  cfg.start_block = a.from;
  cfg.end_block = a.to;
  if (a.from_set && a.to_set && a.to <= a.from) {
    throw CLI::ValidationError("--to", "block range is empty");
  }
  if (a.base_fees.empty()) throw CLI::ValidationError("--base-fee-usd", "needs a value");
  for (double b : a.base_fees) {
    cfg.base_fee_usd = b;
    cfg.validate();
  }

  const Dataset ds = load_dataset(require_data_dir(g), g.max_price_gap);
  if (!a.from_set || !a.to_set) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& [id, rows] : ds.snapshots.pools) {
      if (rows.empty()) continue;
      lo = std::min(lo, rows.front().block);
      hi = std::max(hi, rows.back().block + 1);
    }
    if (lo > hi) throw NotEnoughDataError("dataset has no reserve snapshots");
    if (!a.from_set) cfg.start_block = lo;
    if (!a.to_set) cfg.end_block = hi;
    if (cfg.end_block <= cfg.start_block) throw CLI::ValidationError("--from/--to", "block range is empty");
  }

  const bool sweep = a.base_fees.size() > 1;
  for (double b : a.base_fees) {
    cfg.base_fee_usd = b;
    const CostReport report = run_replay(cfg, ds);
    const fs::path dir = sweep ? fs::path(a.out_dir) / ("base_fee_" + num(b)) : fs::path(a.out_dir);
    write_report_files(report, dir);
    emit_report(report, g.report_format(), out);
    if (g.format != "csv") out << "wrote " << (dir / "report_costs.csv").string() << "\n";
  }
  return kOk;
}

// ---- fixture ------------------------------------------------------------

struct FixtureArgs {
  FixtureSpec spec;
  double target_mean_abs = -1.0;
  std::string out_dir;
};

int cmd_fixture(FixtureArgs a, const Globals& g, std::ostream& out) {
  a.spec.seed = g.seed;
  if (a.target_mean_abs >= 0.0) {
    a.spec.volatility = volatility_for_mean_abs_change(a.target_mean_abs, a.spec.no_trade_prob);
  }
  const Dataset ds = generate_fixture(a.spec);
  const std::string dir = a.out_dir.empty() ? require_data_dir(g) : a.out_dir;
  write_dataset(dir, ds);
  if (g.format != "csv") {
    out << "wrote " << a.spec.blocks << " blocks for pool " << a.spec.pool_id << " to " << dir
        << " (volatility " << num(a.spec.volatility) << ", seed " << a.spec.seed << ")\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sandwich-attack analysis and slippage advice for constant-product pools",
               args.empty() ? "sandwich" : args.front()};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--data-dir", g.data_dir, "dataset directory (pools, snapshots, prices)");
  app.add_option("--seed", g.seed, "seed for fixture generation")->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "text"}))
      ->capture_default_str();
  app.add_option("--max-price-gap", g.max_price_gap, "forward-fill limit for price feeds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "optimal sandwich against one trade");
  attack_cmd->add_option("--x", attack.x, "reserve of X")->required();
  attack_cmd->add_option("--y", attack.y, "reserve of Y")->required();
  attack_cmd->add_option("--fee", attack.fee, "pool fee")->capture_default_str();
  attack_cmd->add_option("--victim-in", attack.victim_in, "victim input in X")->required();
  attack_cmd->add_option("--slippage", attack.slippage, "victim slippage tolerance")->capture_default_str();
  attack_cmd->add_option("--base-fee-x", attack.base_fee_x, "base fee per swap in X")->capture_default_str();

  AdviseArgs advise;
  auto* advise_cmd = app.add_subcommand("advise", "slippage tolerance for a trade");
  advise_cmd->add_option("--pool", advise.pool, "pool id")->required();
  advise_cmd->add_option("--block", advise.block, "submission block")->required();
  advise_cmd->add_option("--size-usd", advise.size_usd, "expected output in USD")->required();
  advise_cmd->add_option("--base-fee-usd", advise.base_fee_usd, "base fee in USD")->capture_default_str();
  advise.policy.add_to(advise_cmd);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "evaluate the percentile slippage predictor");
  predict_cmd->add_option("--pool", predict.pool, "pool id")->required();
  predict_cmd->add_option("--sizes", predict.sizes, "trade sizes in USD")->capture_default_str();
  predict_cmd->add_option("--p", predict.levels, "failure probabilities")->capture_default_str();
  predict_cmd->add_option("--w", predict.windows, "window lengths")->capture_default_str();
  predict_cmd->add_option("--from", predict.from, "first block evaluated");
  predict_cmd->add_option("--to", predict.to, "end block (exclusive)");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "backtest both slippage policies");
  replay_cmd->add_option("--sizes", replay.sizes, "trade sizes in USD")->capture_default_str();
  replay_cmd->add_option("--base-fee-usd", replay.base_fees, "base fee(s) in USD; several values sweep")
      ->capture_default_str();
  replay_cmd->add_option("--baseline", replay.baseline, "constant baseline tolerance")->capture_default_str();
  replay_cmd->add_option("--max-retries", replay.max_retries, "retries before a trade is abandoned")
      ->capture_default_str();
  replay_cmd->add_option("--out-dir", replay.out_dir, "directory for report files")->capture_default_str();
  auto* from_opt = replay_cmd->add_option("--from", replay.from, "first block");
  auto* to_opt = replay_cmd->add_option("--to", replay.to, "end block (exclusive)");
  replay.policy.add_to(replay_cmd);

  FixtureArgs fixture;
  auto* fixture_cmd = app.add_subcommand("fixture", "write a synthetic dataset");
  fixture_cmd->add_option("--out-dir", fixture.out_dir, "output directory (default: --data-dir)");
  fixture_cmd->add_option("--blocks", fixture.spec.blocks, "number of blocks")->capture_default_str();
  fixture_cmd->add_option("--start-block", fixture.spec.start_block, "first block")->capture_default_str();
  fixture_cmd->add_option("--volatility", fixture.spec.volatility, "per-block log volatility of reserve_y")
      ->capture_default_str();
  fixture_cmd->add_option("--target-mean-abs", fixture.target_mean_abs,
                          "calibrate volatility to this mean |slippage|");
  fixture_cmd->add_option("--drift", fixture.spec.drift, "per-block log drift")->capture_default_str();
  fixture_cmd->add_option("--no-trade-prob", fixture.spec.no_trade_prob, "probability of a quiet block")
      ->capture_default_str();
  fixture_cmd->add_option("--pool-id", fixture.spec.pool_id)->capture_default_str();
  fixture_cmd->add_option("--reserve-x", fixture.spec.reserve_x)->capture_default_str();
  fixture_cmd->add_option("--reserve-y", fixture.spec.reserve_y)->capture_default_str();
  fixture_cmd->add_option("--fee", fixture.spec.fee)->capture_default_str();
  fixture_cmd->add_option("--price-y-usd", fixture.spec.price_y_usd)->capture_default_str();

  try {
    // CLI11 consumes a reversed argument list without the program name.
    std::vector<std::string> rev;
    if (args.size() > 1) rev.assign(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*attack_cmd) return cmd_attack(attack, g, out);
    if (*advise_cmd) return cmd_advise(advise, g, out);
    if (*predict_cmd) return cmd_predict(predict, g, out);
    if (*replay_cmd) {
      replay.from_set = from_opt->count() > 0;
      replay.to_set = to_opt->count() > 0;
      return cmd_replay(replay, g, out);
    }
    if (*fixture_cmd) return cmd_fixture(fixture, g, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NotEnoughDataError& e) {
    err << "insufficient data: " << e.what() << "\n";
    return kInsufficientData;
  } catch (const SearchFailureError& e) {
    err << "insufficient data: " << e.what() << "\n";
    return kInsufficientData;
  } catch (const IngestionError& e) {
    err << "ingestion error: " << e.what() << "\n";
    return kIngestion;
  } catch (const DataError& e) {
    err << "data error at block " << e.block() << ": " << e.what() << "\n";
    return kIngestion;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace sandwich::cli
