#pragma once

// Block replay of hypothetical trades under the adaptive slippage policy and a
// constant baseline tolerance.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sandwich/cpmm.hpp"
#include "sandwich/data_io.hpp"
#include "sandwich/policy.hpp"
#include "sandwich/stats.hpp"

namespace sandwich {

/// One input record for reserve reconstruction: either a full snapshot or a
/// swap applied to the current state.
struct ReserveEvent {
  enum class Kind { snapshot, swap_x, swap_y };

  Kind kind = Kind::snapshot;
  std::int64_t block = 0;
  double reserve_x = 0.0;  // snapshot only
  double reserve_y = 0.0;  // snapshot only
  double fee = kDefaultPoolFee;  // snapshot only
  double amount = 0.0;     // swap input, in X for swap_x and Y for swap_y
};

/// One state per block in [first_block, end_block), forward-filled. Events
/// must be sorted by block; those sharing a block apply in order.
std::vector<PoolState> reconstruct_reserves(std::span<const ReserveEvent> events,
                                            std::int64_t first_block, std::int64_t end_block);
std::vector<PoolState> reconstruct_reserves(std::span<const PoolSnapshotRecord> snapshots,
                                            std::int64_t first_block, std::int64_t end_block);

enum class TradePolicy { ours, baseline };

std::string_view to_string(TradePolicy p);

struct ReplayConfig {
  std::int64_t start_block = 0;
  std::int64_t end_block = 0;  // exclusive
  std::vector<double> trade_sizes_usd{10.0, 100.0, 1000.0, 10000.0, 100000.0};
  double base_fee_usd = 4.0;
  double baseline_slippage = 0.005;
  PolicyParams policy_params;
  int max_retries = 50;

  void validate() const;
};

struct TradeRecord {
  std::int64_t block = 0;  // first submission
  double size_usd = 0.0;
  TradePolicy policy = TradePolicy::ours;
  double chosen_s = 0.0;  // tolerance of the final attempt
  bool attacked = false;
  int failed_attempts = 0;
  double fractional_cost = 0.0;
  bool abandoned = false;
};

/// Per-pool inputs shared by every trade of a replay.
struct PoolReplayData {
  std::string pool_id;
  std::vector<PoolState> states;  // one per block, contiguous
  std::map<double, SlippageHistory> histories;  // keyed by size in USD
  UsdPriceFn usd_price_y;

  const PoolState& state_at(std::int64_t block) const;
};

PoolReplayData prepare_pool(const Dataset& dataset, const std::string& pool_id,
                            const ReplayConfig& config);

/// True when the trade can be simulated at `block`: an observed slippage for
/// that block exists and the policy window holds enough observations.
bool trade_eligible(const PoolReplayData& pool, double size_usd, std::int64_t block,
                    const ReplayConfig& config);

TradeRecord simulate_trade(std::int64_t block, double size_usd, TradePolicy policy,
                           const PoolReplayData& pool, const ReplayConfig& config);

struct CostRow {
  std::string pool_id;
  double size_usd = 0.0;
  TradePolicy policy = TradePolicy::ours;
  double mean_frac_cost = 0.0;
  std::size_t trades = 0;  // completed trades
  std::size_t failed_trades = 0;
  double avg_failed_attempts = 0.0;  // over trades that failed at least once
  std::size_t attacked_trades = 0;
  std::size_t abandoned_trades = 0;
};

struct RatioRow {
  std::string pool_id;
  double size_usd = 0.0;
  double cost_ratio = 0.0;  // baseline / ours; +inf when only ours is 0
};

struct CostReport {
  double base_fee_usd = 0.0;
  std::vector<CostRow> rows;  // sorted by pool, size, policy (ours first)
  std::vector<RatioRow> ratios;
};

CostReport run_replay(const ReplayConfig& config, const Dataset& dataset);

enum class ReportFormat { csv, text };

std::string costs_csv(const CostReport& report);
std::string ratio_csv(const CostReport& report);
void emit_report(const CostReport& report, ReportFormat format, std::ostream& out);
/// Writes report_costs.csv and report_ratio.csv into `dir`.
void write_report_files(const CostReport& report, const std::filesystem::path& dir);

}  // namespace sandwich
