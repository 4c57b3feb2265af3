#include "sandwich/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sandwich/errors.hpp"
#include "sandwich/game.hpp"

namespace sandwich {

namespace {

void check_state(const PoolState& s) {
  if (!(s.reserve_x > 0.0) || !(s.reserve_y > 0.0) || !std::isfinite(s.reserve_x) ||
      !std::isfinite(s.reserve_y)) {
    std::ostringstream os;
    os << "non-positive reserve at block " << s.block << " (x=" << s.reserve_x
       << ", y=" << s.reserve_y << ")";
    throw DataError(os.str(), s.block);
  }
}

template <class Record, class Apply>
std::vector<PoolState> fold_states(std::span<const Record> records, std::int64_t first_block,
                                   std::int64_t end_block, Apply&& apply) {
  if (end_block <= first_block) throw DomainError("reserve range is empty");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].block < records[i - 1].block) {
      throw IngestionError("reserve records are not sorted by block");
    }
  }
  std::vector<PoolState> out;
  out.reserve(static_cast<std::size_t>(end_block - first_block));
  PoolState cur;
  bool have = false;
  std::size_t i = 0;
  for (std::int64_t b = first_block; b < end_block; ++b) {
    for (; i < records.size() && records[i].block <= b; ++i) {
      apply(cur, have, records[i]);
      cur.block = records[i].block;
      check_state(cur);
    }
    if (!have) {
      std::ostringstream os;
      os << "no reserve snapshot at or before block " << b;
      throw IngestionError(os.str());
    }
    cur.block = b;
    out.push_back(cur);
  }
  return out;
}

}  // namespace

std::vector<PoolState> reconstruct_reserves(std::span<const ReserveEvent> events,
                                            std::int64_t first_block, std::int64_t end_block) {
  return fold_states(events, first_block, end_block,
                     [](PoolState& cur, bool& have, const ReserveEvent& e) {
                       switch (e.kind) {
                         case ReserveEvent::Kind::snapshot:
                           cur = PoolState{e.reserve_x, e.reserve_y, e.fee, e.block};
                           have = true;
                           return;
                         case ReserveEvent::Kind::swap_x:
                         case ReserveEvent::Kind::swap_y:
                           if (!have) {
                             std::ostringstream os;
                             os << "swap at block " << e.block << " precedes any snapshot";
                             throw IngestionError(os.str());
                           }
                           cur = e.kind == ReserveEvent::Kind::swap_x ? apply_swap(cur, e.amount).pool
                                                                      : apply_swap_y(cur, e.amount).pool;
                           return;
                       }
                     });
}

std::vector<PoolState> reconstruct_reserves(std::span<const PoolSnapshotRecord> snapshots,
                                            std::int64_t first_block, std::int64_t end_block) {
  return fold_states(snapshots, first_block, end_block,
                     [](PoolState& cur, bool& have, const PoolSnapshotRecord& r) {
                       cur = PoolState{r.reserve_x, r.reserve_y, r.fee, r.block};
                       have = true;
                     });
}

std::string_view to_string(TradePolicy p) { return p == TradePolicy::ours ? "OURS" : "BASELINE"; }

void ReplayConfig::validate() const {
  if (end_block <= start_block) throw DomainError("replay: block range is empty");
  if (trade_sizes_usd.empty()) throw DomainError("replay: no trade sizes");
  for (double s : trade_sizes_usd) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("replay: trade sizes must be positive");
  }
  if (!(base_fee_usd > 0.0) || !std::isfinite(base_fee_usd)) {
    throw DomainError("replay: base fee must be positive");
  }
  if (!(baseline_slippage > 0.0 && baseline_slippage < 1.0)) {
    throw DomainError("replay: baseline slippage must be in (0, 1)");
  }
  if (max_retries < 0) throw DomainError("replay: max_retries must be non-negative");
  policy_params.validate();
}

const PoolState& PoolReplayData::state_at(std::int64_t block) const {
  if (states.empty() || block < states.front().block || block > states.back().block) {
    std::ostringstream os;
    os << "pool '" << pool_id << "' has no state for block " << block;
    throw NotEnoughDataError(os.str());
  }
  return states[static_cast<std::size_t>(block - states.front().block)];
}

PoolReplayData prepare_pool(const Dataset& dataset, const std::string& pool_id,
                            const ReplayConfig& config) {
  const PoolInfo& info = dataset.pool(pool_id);
  const auto it = dataset.snapshots.pools.find(pool_id);
  if (it == dataset.snapshots.pools.end() || it->second.empty()) {
    throw NotEnoughDataError("pool '" + pool_id + "' has no reserve snapshots");
  }
  const auto& snaps = it->second;

  PoolReplayData data;
  data.pool_id = pool_id;
  data.states = reconstruct_reserves(std::span<const PoolSnapshotRecord>(snaps),
                                     snaps.front().block, snaps.back().block + 1);
  const PriceFeed* feed = &dataset.prices;
  const std::string token = info.token_y;
  data.usd_price_y = [feed, token](std::int64_t block) { return feed->usd_price(token, block); };
  if (data.states.size() < 2) return data;
  for (double size : config.trade_sizes_usd) {
    data.histories.emplace(size, block_slippage_series(data.states, size, data.usd_price_y,
                                                       config.policy_params.window, pool_id));
  }
  return data;
}

bool trade_eligible(const PoolReplayData& pool, double size_usd, std::int64_t block,
                    const ReplayConfig& config) {
  const auto it = pool.histories.find(size_usd);
  if (it == pool.histories.end()) return false;
  const SlippageHistory& h = it->second;
  if (!h.at(block)) return false;
  return h.count_before(block) >= std::max<std::size_t>(1, config.policy_params.min_observations);
}

TradeRecord simulate_trade(std::int64_t block, double size_usd, TradePolicy policy,
                           const PoolReplayData& pool, const ReplayConfig& config) {
  if (!trade_eligible(pool, size_usd, block, config)) {
    std::ostringstream os;
    os << "no slippage history for pool '" << pool.pool_id << "', size " << size_usd
       << " at block " << block;
    throw NotEnoughDataError(os.str());
  }
  const SlippageHistory& history = pool.histories.at(size_usd);
  const PolicyParams& params = config.policy_params;

  TradeRecord rec;
  rec.block = block;
  rec.size_usd = size_usd;
  rec.policy = policy;

  double first_output = 0.0;
  double cost = 0.0;
  for (std::int64_t t = block;; ++t) {
    const auto realized = history.at(t);
    if (!realized) {
      rec.abandoned = true;
      break;
    }
    const PoolState& state = pool.state_at(t);
    const double price_y = pool.usd_price_y(t);
    TradeIntent intent;
    intent.pool = state;
    intent.input_x = swap_input_for_output(state, size_usd / price_y);
    intent.base_fee_y = config.base_fee_usd / price_y;
    const double expected = expected_output(intent);
    if (first_output == 0.0) first_output = expected;
    const double scale = expected / first_output;

    intent.slippage = policy == TradePolicy::baseline
                          ? config.baseline_slippage
                          : choose_slippage(intent, history, t, params).chosen;
    rec.chosen_s = intent.slippage;

    if (is_attackable(intent)) {
      rec.attacked = true;
      cost += intent.slippage * scale;
      break;
    }
    if (*realized <= intent.slippage) {
      cost += std::max(*realized, 0.0) * scale;
      break;
    }
    ++rec.failed_attempts;
    const double retry_fee =
        (params.failed_tx_gas_fraction + params.base_fee_step) * intent.base_fee_y / expected;
    cost += (retry_fee + *realized) * scale;
    if (rec.failed_attempts > config.max_retries) {
      rec.abandoned = true;
      break;
    }
  }
  rec.fractional_cost = cost;
  return rec;
}

CostReport run_replay(const ReplayConfig& config, const Dataset& dataset) {
  config.validate();

  std::vector<double> sizes = config.trade_sizes_usd;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  ReplayConfig cfg = config;
  cfg.trade_sizes_usd = sizes;

  // Build every pool's inputs first so ingestion problems surface before any simulation.
  std::vector<PoolReplayData> pools;
  for (const auto& [pool_id, snaps] : dataset.snapshots.pools) {
    if (!snaps.empty()) pools.push_back(prepare_pool(dataset, pool_id, cfg));
  }

  CostReport report;
  report.base_fee_usd = cfg.base_fee_usd;
  std::size_t simulated = 0;
  for (const PoolReplayData& pool : pools) {
    for (double size : sizes) {
      CostRow pair[2];
      for (TradePolicy policy : {TradePolicy::ours, TradePolicy::baseline}) {
        CostRow& row = pair[policy == TradePolicy::ours ? 0 : 1];
        row.pool_id = pool.pool_id;
        row.size_usd = size;
        row.policy = policy;
        double cost_sum = 0.0;
        std::size_t attempts_sum = 0;
        for (std::int64_t b = cfg.start_block; b < cfg.end_block; ++b) {
          if (!trade_eligible(pool, size, b, cfg)) continue;
          const TradeRecord rec = simulate_trade(b, size, policy, pool, cfg);
          ++simulated;
          if (rec.abandoned) {
            ++row.abandoned_trades;
            continue;
          }
          ++row.trades;
          cost_sum += rec.fractional_cost;
          if (rec.attacked) ++row.attacked_trades;
          if (rec.failed_attempts > 0) {
            ++row.failed_trades;
            attempts_sum += static_cast<std::size_t>(rec.failed_attempts);
          }
        }
        row.mean_frac_cost = row.trades > 0 ? cost_sum / static_cast<double>(row.trades) : 0.0;
        row.avg_failed_attempts = row.failed_trades > 0
                                      ? static_cast<double>(attempts_sum) /
                                            static_cast<double>(row.failed_trades)
                                      : 0.0;
      }
      RatioRow ratio{pool.pool_id, size, 1.0};
      const double ours = pair[0].mean_frac_cost;
      const double base = pair[1].mean_frac_cost;
      if (ours > 0.0) {
        ratio.cost_ratio = base / ours;
      } else if (base > 0.0) {
        ratio.cost_ratio = std::numeric_limits<double>::infinity();
      }
      report.rows.push_back(pair[0]);
      report.rows.push_back(pair[1]);
      report.ratios.push_back(ratio);
    }
  }
  if (simulated == 0) {
    std::ostringstream os;
    os << "no block in [" << cfg.start_block << ", " << cfg.end_block
       << ") has enough slippage history to simulate a trade";
    throw NotEnoughDataError(os.str());
  }
  return report;
}

}  // namespace sandwich
