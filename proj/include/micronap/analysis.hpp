#ifndef MICRONAP_ANALYSIS_HPP
#define MICRONAP_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "micronap/hw_profile.hpp"
#include "micronap/phy.hpp"

namespace micronap {

// Fraction of a nap spent at sleep power: (dt - t_waste) / dt. Throws
// SleepTooShortError below the hardware minimum.
double sleep_efficiency(const HardwareProfile& p, std::int64_t dt_sleep_us);

// The same curve without a profile, for waste sweeps.
double efficiency_curve(std::int64_t waste_us, std::int64_t dt_sleep_us);

// Smallest data payload (bytes) whose single-frame exchange covers the
// hardware sleep minimum. The bound expands the dozeable window of a
// data+ACK exchange overheard at the header decision point:
//   8(14 + l + 4)/rate_data + SIFS + PLCP + 8(14 + 2)/rate_ack + SIFS
// with rates in Mbps. Solved exactly in integer-scaled arithmetic.
struct MinPayloadQuery {
    double rate_data_mbps = 6;
    double rate_ack_mbps = 6;
    std::int64_t t_sleep_min_us = 300;
    std::uint32_t max_payload = 1500;
};

struct MinPayloadResult {
    std::int64_t l_min = 0;  // exact bound, clamped at 0, may exceed max_payload
    bool applicable = false; // l_min <= max_payload
};

MinPayloadResult min_sleepable_payload(const MinPayloadQuery& q);

// Control-rate pairing: a data rate is acknowledged at the highest mandatory
// rate (6, 12, 24) not above it.
double ack_rate_for(double rate_data_mbps);

// Fraction of payload sizes 0..1500 at or above l_min: (1500 - l_min + 1)/1501,
// clamped to [0, 1].
double applicable_fraction(const MinPayloadResult& r, std::uint32_t max_payload = 1500);

struct ApplicabilityRow {
    double rate_data_mbps = 0;
    double rate_ack_mbps = 0;
    std::int64_t l_min = 0;
    bool applicable = false;
    double fraction = 0;
};

// One row per 11a rate with the default ACK pairing.
std::vector<ApplicabilityRow> applicability_table(const HardwareProfile& p, const PhyParams& phy);

// Idle power of the reference card as a function of its clock (MHz):
// 0.91 + 0.0051 * f_mhz, an affine fit to downclocking measurements.
double clock_power_w(double freq_mhz);

} // namespace micronap

#endif
