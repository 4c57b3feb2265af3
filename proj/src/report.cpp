#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sandwich/errors.hpp"
#include "sandwich/replay.hpp"

namespace sandwich {

namespace {

std::string sci(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

std::string size_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot write " + path.string());
  out << body;
  out.flush();
  if (!out) throw IngestionError("write failed: " + path.string());
}

}  // namespace

std::string costs_csv(const CostReport& report) {
  std::ostringstream os;
  os << "pool,size_usd,policy,mean_frac_cost,failed_trades,avg_failed_attempts,attacked_trades\n";
  for (const CostRow& r : report.rows) {
    os << r.pool_id << ',' << size_str(r.size_usd) << ',' << to_string(r.policy) << ','
       << sci(r.mean_frac_cost) << ',' << r.failed_trades << ',' << sci(r.avg_failed_attempts)
       << ',' << r.attacked_trades << '\n';
  }
  return os.str();
}

std::string ratio_csv(const CostReport& report) {
  std::ostringstream os;
  os << "pool,size_usd,cost_ratio\n";
  for (const RatioRow& r : report.ratios) {
    os << r.pool_id << ',' << size_str(r.size_usd) << ',' << sci(r.cost_ratio) << '\n';
  }
  return os.str();
}

void emit_report(const CostReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::csv) {
    out << costs_csv(report);
    return;
  }
  out << "base fee $" << size_str(report.base_fee_usd) << "\n";
  out << std::left << std::setw(12) << "pool" << std::right << std::setw(10) << "size_usd"
      << std::setw(10) << "policy" << std::setw(12) << "frac_cost" << std::setw(8) << "trades"
      << std::setw(8) << "failed" << std::setw(12) << "avg_fails" << std::setw(10) << "attacked"
      << std::setw(10) << "abandoned" << "\n";
  for (const CostRow& r : report.rows) {
    out << std::left << std::setw(12) << r.pool_id << std::right << std::setw(10)
        << size_str(r.size_usd) << std::setw(10) << to_string(r.policy) << std::setw(12)
        << sci(r.mean_frac_cost) << std::setw(8) << r.trades << std::setw(8) << r.failed_trades
        << std::setw(12) << sci(r.avg_failed_attempts) << std::setw(10) << r.attacked_trades
        << std::setw(10) << r.abandoned_trades << "\n";
  }
  out << "\n" << std::left << std::setw(12) << "pool" << std::right << std::setw(10)
      << "size_usd" << std::setw(12) << "ratio" << "\n";
  for (const RatioRow& r : report.ratios) {
    out << std::left << std::setw(12) << r.pool_id << std::right << std::setw(10)
        << size_str(r.size_usd) << std::setw(12) << sci(r.cost_ratio) << "\n";
  }
}

void write_report_files(const CostReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IngestionError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report_costs.csv", costs_csv(report));
  write_file(dir / "report_ratio.csv", ratio_csv(report));
}

}  // namespace sandwich
