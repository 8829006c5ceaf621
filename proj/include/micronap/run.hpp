#ifndef MICRONAP_RUN_HPP
#define MICRONAP_RUN_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace micronap {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;   // bad flags, bad profile
inline constexpr int kExitInput = 2;    // unreadable/invalid trace data
inline constexpr int kExitInternal = 3; // post-run invariant violation

struct AnalyzeConfig {
    std::vector<std::string> inputs;
    std::string format = "ndjson"; // or "pcap"
    std::string profile_path;      // empty = built-in AR9280
    std::string out_path = "ledger.csv";
    std::string decision_log_path; // optional
    double online_threshold_s = 300.0;
    int workers = 0; // 0 = hardware concurrency
    double battery_volts = 3.7;
};

struct ConvertConfig {
    std::vector<std::string> inputs; // pcap
    std::string out_path = "trace.ndjson";
};

struct EnergyConfig {
    std::string ledger_path;
    std::string profile_path;
    std::string out_path = "energy.csv";
    double battery_volts = 3.7;
};

struct PlossConfig {
    double ber_min = 1e-8;
    double ber_max = 1e-2;
    int points = 25;
    std::vector<double> lambda_b{1, 2, 3, 5};
    std::string out_path = "ploss.csv";
};

struct EfficiencyConfig {
    std::vector<std::int64_t> waste_us{250, 150, 50, 0};
    std::int64_t sweep_from_us = 300;
    std::int64_t sweep_to_us = 5000;
    std::int64_t sweep_step_us = 10;
    std::string out_path = "efficiency.csv";
};

struct ApplicabilityConfig {
    std::string profile_path;
    std::string out_path = "applicability.csv";
};

struct DurationsConfig {
    std::vector<std::string> inputs;
    std::string format = "ndjson";
    std::string out_path = "durations.csv";
};

struct ClockConfig {
    double freq_mhz = 44;
};

// Each runs one subcommand end to end and returns an exit code. Errors are
// reported on stderr; the analyze run also echoes its resolved configuration
// next to the ledger for reproducibility.
int run_analyze(const AnalyzeConfig& cfg);
int run_convert(const ConvertConfig& cfg);
int run_energy(const EnergyConfig& cfg);
int run_ploss(const PlossConfig& cfg);
int run_efficiency(const EfficiencyConfig& cfg);
int run_applicability(const ApplicabilityConfig& cfg);
int run_durations(const DurationsConfig& cfg);
int run_clock(const ClockConfig& cfg);

} // namespace micronap

#endif
