#include "sandwich/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "sandwich/errors.hpp"

namespace sandwich {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << what;
  throw IngestionError(os.str());
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line,
                    const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(path, line, std::string("invalid number for ") + field + ": '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, const fs::path& path, std::size_t line,
                       const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(path, line, std::string("invalid integer for ") + field + ": '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool is_jsonl(const fs::path& path) { return path.extension() == ".jsonl"; }

// A table row as field -> text, regardless of the file format.
using Row = std::map<std::string, std::string>;

// Calls fn(row, line_number) for every data row. CSV needs a header.
template <class Fn>
void for_each_row(const fs::path& path, const std::vector<std::string>& required, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  if (is_jsonl(path)) {
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        fail(path, lineno, std::string("malformed JSON: ") + e.what());
      }
      if (!j.is_object()) fail(path, lineno, "expected a JSON object");
      Row row;
      for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
          row[key] = value.template get<std::string>();
        } else if (value.is_number_integer()) {
          row[key] = std::to_string(value.template get<std::int64_t>());
        } else if (value.is_number()) {
          row[key] = format_double(value.template get<double>());
        } else {
          fail(path, lineno, "field '" + key + "' must be a string or number");
        }
      }
      for (const auto& r : required) {
        if (!row.count(r)) fail(path, lineno, "missing field '" + r + "'");
      }
      fn(row, lineno);
    }
    return;
  }

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (header.empty()) {
      header = split_csv(line);
      for (const auto& r : required) {
        if (std::find(header.begin(), header.end(), r) == header.end()) {
          fail(path, lineno, "header lacks column '" + r + "'");
        }
      }
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "expected " << header.size() << " fields, got " << cells.size();
      fail(path, lineno, os.str());
    }
    Row row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    fn(row, lineno);
  }
}

fs::path pick(const fs::path& dir, const std::string& stem) {
  const fs::path csv = dir / (stem + ".csv");
  if (fs::exists(csv)) return csv;
  const fs::path jsonl = dir / (stem + ".jsonl");
  if (fs::exists(jsonl)) return jsonl;
  throw IngestionError("dataset " + dir.string() + " has no " + stem + ".csv or " + stem + ".jsonl");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot write " + path.string());
  return out;
}

}  // namespace

SnapshotSet load_snapshots(const fs::path& path) {
  SnapshotSet set;
  // Insertion order per pool, so last-write-wins is well defined.
  std::map<std::string, std::vector<std::pair<PoolSnapshotRecord, std::size_t>>> raw;
  for_each_row(path, {"pool_id", "block", "reserve_x", "reserve_y"},
               [&](const Row& row, std::size_t line) {
                 PoolSnapshotRecord r;
                 r.pool_id = row.at("pool_id");
                 if (r.pool_id.empty()) fail(path, line, "empty pool_id");
                 r.block = parse_int(row.at("block"), path, line, "block");
                 r.reserve_x = parse_double(row.at("reserve_x"), path, line, "reserve_x");
                 r.reserve_y = parse_double(row.at("reserve_y"), path, line, "reserve_y");
                 if (auto it = row.find("fee"); it != row.end() && !it->second.empty()) {
                   r.fee = parse_double(it->second, path, line, "fee");
                 }
                 if (!(r.reserve_x > 0.0)) fail(path, line, "reserve_x must be positive");
                 if (!(r.reserve_y > 0.0)) fail(path, line, "reserve_y must be positive");
                 if (!(r.fee >= 0.0 && r.fee < 1.0)) fail(path, line, "fee must be in [0, 1)");
                 raw[r.pool_id].emplace_back(std::move(r), line);
               });

  for (auto& [pool, rows] : raw) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first.block < b.first.block; });
    auto& out = set.pools[pool];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!out.empty() && out.back().block == rows[i].first.block) {
        std::ostringstream os;
        os << path.string() << ":" << rows[i].second << ": duplicate block " << rows[i].first.block
           << " for pool " << pool << "; keeping the later row";
        set.warnings.push_back(os.str());
        out.back() = rows[i].first;
      } else {
        out.push_back(rows[i].first);
      }
    }
  }
  return set;
}

void PriceFeed::add(const PriceFeedRecord& record) {
  auto& s = series_[record.token];
  if (!s.empty() && record.block < s.back().block) {
    throw IngestionError("price feed for " + record.token + " is not sorted by block");
  }
  if (!s.empty() && record.block == s.back().block) {
    s.back() = record;
  } else {
    s.push_back(record);
  }
}

double PriceFeed::usd_price(const std::string& token, std::int64_t block) const {
  const auto it = series_.find(token);
  if (it == series_.end()) throw IngestionError("no price feed for token '" + token + "'");
  const auto& s = it->second;
  auto pos = std::upper_bound(s.begin(), s.end(), block,
                              [](std::int64_t b, const PriceFeedRecord& r) { return b < r.block; });
  if (pos == s.begin()) {
    std::ostringstream os;
    os << "price feed for '" << token << "' starts at block " << s.front().block
       << ", no price for block " << block;
    throw IngestionError(os.str());
  }
  const PriceFeedRecord& last = *(pos - 1);
  if (block - last.block > max_gap_) {
    std::ostringstream os;
    os << "price feed for '" << token << "' has no record in blocks " << last.block + 1 << ".."
       << block << " (forward-fill limit " << max_gap_ << ")";
    throw IngestionError(os.str());
  }
  return last.usd_price;
}

PriceFeed load_price_feed(const fs::path& path, std::int64_t max_gap) {
  std::map<std::string, std::vector<PriceFeedRecord>> raw;
  for_each_row(path, {"token", "block", "usd_price"}, [&](const Row& row, std::size_t line) {
    PriceFeedRecord r;
    r.token = row.at("token");
    if (r.token.empty()) fail(path, line, "empty token");
    r.block = parse_int(row.at("block"), path, line, "block");
    r.usd_price = parse_double(row.at("usd_price"), path, line, "usd_price");
    if (!(r.usd_price > 0.0)) fail(path, line, "usd_price must be positive");
    raw[r.token].push_back(std::move(r));
  });

  PriceFeed feed(max_gap);
  for (auto& [token, rows] : raw) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.block < b.block; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const std::int64_t missing = rows[i].block - rows[i - 1].block - 1;
      if (missing > max_gap) {
        std::ostringstream os;
        os << path.string() << ": price feed for '" << token << "' is missing blocks "
           << rows[i - 1].block + 1 << ".." << rows[i].block - 1 << " (" << missing
           << " blocks, forward-fill limit " << max_gap << ")";
        throw IngestionError(os.str());
      }
    }
    for (const auto& r : rows) feed.add(r);
  }
  return feed;
}

std::vector<PoolInfo> load_pools(const fs::path& path) {
  std::vector<PoolInfo> pools;
  for_each_row(path, {"pool_id", "token_x", "token_y"}, [&](const Row& row, std::size_t line) {
    PoolInfo p{row.at("pool_id"), row.at("token_x"), row.at("token_y")};
    if (p.pool_id.empty() || p.token_x.empty() || p.token_y.empty()) {
      fail(path, line, "pool_id, token_x and token_y must be non-empty");
    }
    for (const auto& q : pools) {
      if (q.pool_id == p.pool_id) fail(path, line, "duplicate pool_id '" + p.pool_id + "'");
    }
    pools.push_back(std::move(p));
  });
  std::sort(pools.begin(), pools.end(),
            [](const PoolInfo& a, const PoolInfo& b) { return a.pool_id < b.pool_id; });
  return pools;
}

const PoolInfo& Dataset::pool(const std::string& pool_id) const {
  for (const auto& p : pools) {
    if (p.pool_id == pool_id) return p;
  }
  throw NotEnoughDataError("unknown pool '" + pool_id + "'");
}

Dataset load_dataset(const fs::path& dir, std::int64_t max_gap) {
  if (!fs::is_directory(dir)) throw IngestionError("dataset directory not found: " + dir.string());
  Dataset ds{load_pools(pick(dir, "pools")), load_snapshots(pick(dir, "snapshots")),
             load_price_feed(pick(dir, "prices"), max_gap)};
  for (const auto& [pool_id, rows] : ds.snapshots.pools) {
    (void)rows;
    if (std::none_of(ds.pools.begin(), ds.pools.end(),
                     [&](const PoolInfo& p) { return p.pool_id == pool_id; })) {
      throw IngestionError("snapshots reference pool '" + pool_id + "' missing from pools table");
    }
  }
  return ds;
}

void write_snapshots(const fs::path& path, const SnapshotSet& snapshots) {
  auto out = open_out(path);
  out << "pool_id,block,reserve_x,reserve_y,fee\n";
  for (const auto& [pool, rows] : snapshots.pools) {
    for (const auto& r : rows) {
      out << r.pool_id << ',' << r.block << ',' << format_double(r.reserve_x) << ','
          << format_double(r.reserve_y) << ',' << format_double(r.fee) << '\n';
    }
  }
  if (!out) throw IngestionError("write failed: " + path.string());
}

void write_price_feed(const fs::path& path, const PriceFeed& feed) {
  auto out = open_out(path);
  out << "token,block,usd_price\n";
  for (const auto& [token, rows] : feed.series()) {
    for (const auto& r : rows) {
      out << r.token << ',' << r.block << ',' << format_double(r.usd_price) << '\n';
    }
  }
  if (!out) throw IngestionError("write failed: " + path.string());
}

void write_pools(const fs::path& path, const std::vector<PoolInfo>& pools) {
  auto out = open_out(path);
  out << "pool_id,token_x,token_y\n";
  for (const auto& p : pools) out << p.pool_id << ',' << p.token_x << ',' << p.token_y << '\n';
  if (!out) throw IngestionError("write failed: " + path.string());
}

void write_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  write_pools(dir / "pools.csv", dataset.pools);
  write_snapshots(dir / "snapshots.csv", dataset.snapshots);
  write_price_feed(dir / "prices.csv", dataset.prices);
}

double volatility_for_mean_abs_change(double target, double no_trade_prob) {
  if (!(target >= 0.0)) throw DomainError("target mean change must be non-negative");
  if (!(no_trade_prob >= 0.0 && no_trade_prob < 1.0)) {
    throw DomainError("no-trade probability must be in [0, 1)");
  }
  // Small-trade output scales with y^2 at constant k, so |s| ~ 2 |log step|.
  return target / (2.0 * (1.0 - no_trade_prob) * std::sqrt(2.0 / std::acos(-1.0)));
}

Dataset generate_fixture(const FixtureSpec& spec) {
  if (spec.blocks < 2) throw DomainError("fixture needs at least two blocks");
  if (!(spec.volatility >= 0.0) || !std::isfinite(spec.volatility)) {
    throw DomainError("fixture volatility must be non-negative");
  }
  if (!(spec.no_trade_prob >= 0.0 && spec.no_trade_prob <= 1.0)) {
    throw DomainError("no-trade probability must be in [0, 1]");
  }
  if (!(spec.reserve_x > 0.0 && spec.reserve_y > 0.0 && spec.price_y_usd > 0.0)) {
    throw DomainError("fixture reserves and price must be positive");
  }
  if (!(spec.fee >= 0.0 && spec.fee < 1.0)) throw DomainError("fixture fee must be in [0, 1)");

  std::mt19937_64 rng(spec.seed);
  // 53-bit uniform in [0, 1); explicit so the stream is identical across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto normal = [&] {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::acos(-1.0) * u2);
  };

  Dataset ds;
  ds.pools.push_back({spec.pool_id, spec.token_x, spec.token_y});
  ds.prices = PriceFeed(kDefaultMaxPriceGap);
  auto& rows = ds.snapshots.pools[spec.pool_id];
  rows.reserve(static_cast<std::size_t>(spec.blocks));

  const double k = spec.reserve_x * spec.reserve_y;
  double y = spec.reserve_y;
  double x = spec.reserve_x;
  for (std::int64_t i = 0; i < spec.blocks; ++i) {
    const std::int64_t block = spec.start_block + i;
    if (i > 0) {
      const bool trade = uniform() >= spec.no_trade_prob;
      const double step = spec.drift + spec.volatility * normal();
      if (trade && (spec.volatility > 0.0 || spec.drift != 0.0)) {
        y *= std::exp(step);
        x = k / y;
      }
    }
    rows.push_back({spec.pool_id, block, x, y, spec.fee});
    ds.prices.add({spec.token_y, block, spec.price_y_usd});
    ds.prices.add({spec.token_x, block, spec.price_y_usd * y / x});
  }
  return ds;
}

}  // namespace sandwich
