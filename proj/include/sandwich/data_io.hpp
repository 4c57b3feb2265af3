#pragma once

// Dataset files: pools.csv (pool_id,token_x,token_y), snapshots.csv
// (pool_id,block,reserve_x,reserve_y[,fee]) and prices.csv
// (token,block,usd_price). Each table may instead be given as .jsonl with
// the same field names.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sandwich {

inline constexpr double kDefaultPoolFee = 0.003;
inline constexpr std::int64_t kDefaultMaxPriceGap = 10;

struct PoolSnapshotRecord {
  std::string pool_id;
  std::int64_t block = 0;
  double reserve_x = 0.0;
  double reserve_y = 0.0;
  double fee = kDefaultPoolFee;

  bool operator==(const PoolSnapshotRecord&) const = default;
};

struct PriceFeedRecord {
  std::string token;
  std::int64_t block = 0;
  double usd_price = 0.0;

  bool operator==(const PriceFeedRecord&) const = default;
};

struct PoolInfo {
  std::string pool_id;
  std::string token_x;
  std::string token_y;

  bool operator==(const PoolInfo&) const = default;
};

struct SnapshotSet {
  std::map<std::string, std::vector<PoolSnapshotRecord>> pools;  // sorted by block, unique
  std::vector<std::string> warnings;
};

/// Per-token USD prices with forward fill across gaps of at most max_gap blocks.
class PriceFeed {
 public:
  explicit PriceFeed(std::int64_t max_gap = kDefaultMaxPriceGap) : max_gap_(max_gap) {}

  /// Records per token must arrive sorted; a duplicate block overwrites.
  void add(const PriceFeedRecord& record);

  /// Throws IngestionError when the token is unknown, the block precedes the
  /// first record, or the block is more than max_gap blocks past the last one.
  double usd_price(const std::string& token, std::int64_t block) const;

  bool has_token(const std::string& token) const { return series_.count(token) != 0; }
  std::int64_t max_gap() const noexcept { return max_gap_; }
  const std::map<std::string, std::vector<PriceFeedRecord>>& series() const noexcept {
    return series_;
  }

 private:
  std::int64_t max_gap_;
  std::map<std::string, std::vector<PriceFeedRecord>> series_;
};

struct Dataset {
  std::vector<PoolInfo> pools;
  SnapshotSet snapshots;
  PriceFeed prices;

  const PoolInfo& pool(const std::string& pool_id) const;
};

SnapshotSet load_snapshots(const std::filesystem::path& path);
PriceFeed load_price_feed(const std::filesystem::path& path,
                          std::int64_t max_gap = kDefaultMaxPriceGap);
std::vector<PoolInfo> load_pools(const std::filesystem::path& path);

/// Reads pools, snapshots and prices from `dir` (.csv preferred over .jsonl).
Dataset load_dataset(const std::filesystem::path& dir, std::int64_t max_gap = kDefaultMaxPriceGap);

void write_snapshots(const std::filesystem::path& path, const SnapshotSet& snapshots);
void write_price_feed(const std::filesystem::path& path, const PriceFeed& feed);
void write_pools(const std::filesystem::path& path, const std::vector<PoolInfo>& pools);
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

struct FixtureSpec {
  std::string pool_id = "FIXTURE";
  std::string token_x = "TKX";
  std::string token_y = "TKY";
  std::int64_t start_block = 1;
  std::int64_t blocks = 1000;
  double volatility = 0.0;  // std-dev of the per-block log change of reserve_y
  double drift = 0.0;       // mean of the per-block log change
  double no_trade_prob = 0.3;
  std::uint64_t seed = 1;
  double reserve_x = 25'000.0;
  double reserve_y = 50'000'000.0;
  double fee = kDefaultPoolFee;
  double price_y_usd = 1.0;
};

/// Seeded reserve random walk. Trade blocks move reserve_y geometrically and
/// keep reserve_x * reserve_y constant; no-trade blocks repeat the state.
Dataset generate_fixture(const FixtureSpec& spec);

/// Volatility whose small-trade mean |slippage| is approximately `target`.
double volatility_for_mean_abs_change(double target, double no_trade_prob);

}  // namespace sandwich
