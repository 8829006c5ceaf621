#ifndef MICRONAP_REPORTS_HPP
#define MICRONAP_REPORTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "micronap/trace_engine.hpp"
#include "micronap/trace_io.hpp"

namespace micronap {

// All floating-point output goes through this: 6 significant digits, fixed
// across runs and worker counts so outputs stay byte-identical.
std::string fmt_g6(double v);

// ledger.csv: one row per station and variant, times in integral
// microseconds, energy over the activity states only.
// Columns: mac,variant,tx_us,rx_us,ov_us,sleep_us,waste_us,idle_us,
//          activity_us,energy_mwh,energy_mah
std::string ledger_csv(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                       double battery_volts = 3.7);

// Re-reads a ledger.csv (the time columns; energy is recomputed).
std::vector<ActivityLedger> parse_ledger_csv(const std::string& path);

// Aggregate JSON: headline savings plus ingestion counters.
std::string summary_json(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                         const IngestStats& stats, std::size_t files, std::size_t ap_count,
                         std::size_t unassociated_count, double battery_volts = 3.7);

void write_text_file(const std::string& path, const std::string& content);

} // namespace micronap

#endif
