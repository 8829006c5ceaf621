#include "micronap/analysis.hpp"

#include <cmath>

#include "micronap/common.hpp"

namespace micronap {

double sleep_efficiency(const HardwareProfile& p, std::int64_t dt_sleep_us) {
    if (dt_sleep_us < p.t_sleep_min_us())
        throw SleepTooShortError("sleep of " + std::to_string(dt_sleep_us) +
                                 " us is under the hardware minimum");
    // (dt - waste)/dt rather than 1 - waste/dt: one correctly rounded
    // division, so exact ratios stay exact (300 us on AR9280 is 1/6).
    return static_cast<double>(dt_sleep_us - p.t_waste_us()) / static_cast<double>(dt_sleep_us);
}

double efficiency_curve(std::int64_t waste_us, std::int64_t dt_sleep_us) {
    if (dt_sleep_us <= 0) throw DomainError("sleep duration must be positive");
    if (waste_us < 0 || waste_us > dt_sleep_us) throw DomainError("waste outside [0, dt]");
    return static_cast<double>(dt_sleep_us - waste_us) / static_cast<double>(dt_sleep_us);
}

MinPayloadResult min_sleepable_payload(const MinPayloadQuery& q) {
    if (q.rate_data_mbps <= 0 || q.rate_ack_mbps <= 0) throw DomainError("rates must be positive");

    // The exchange window in us, as a function of payload l:
    //   8(14+l+4)/rd + 2*SIFS + PLCP + 8*16/ra
    // Scaled by rd*ra every term is exact in doubles for integral
    // microsecond times and the 11a integer rates, so the threshold
    // comparison cannot wobble at the boundary.
    const double rd = q.rate_data_mbps;
    const double ra = q.rate_ack_mbps;
    const double fixed_us = 2.0 * 16.0 + 20.0; // SIFS pair plus PLCP of the ACK
    const double rhs = static_cast<double>(q.t_sleep_min_us) * rd * ra;

    const auto window_scaled = [&](std::int64_t l) {
        return 8.0 * static_cast<double>(18 + l) * ra + fixed_us * rd * ra + 128.0 * rd;
    };

    // Direct solve of the linear inequality, then clamp and verify.
    const double num = rhs - fixed_us * rd * ra - 128.0 * rd;
    std::int64_t l = static_cast<std::int64_t>(std::ceil(num / (8.0 * ra))) - 18;
    if (l < 0) l = 0;
    while (window_scaled(l) < rhs) ++l;
    while (l > 0 && window_scaled(l - 1) >= rhs) --l;

    MinPayloadResult r;
    r.l_min = l;
    r.applicable = l <= static_cast<std::int64_t>(q.max_payload);
    return r;
}

double ack_rate_for(double rate_data_mbps) {
    double best = 6;
    for (double m : {6.0, 12.0, 24.0})
        if (m <= rate_data_mbps) best = m;
    return best;
}

double applicable_fraction(const MinPayloadResult& r, std::uint32_t max_payload) {
    const double span = static_cast<double>(max_payload) + 1.0;
    const double n = static_cast<double>(max_payload) - static_cast<double>(r.l_min) + 1.0;
    if (n <= 0) return 0;
    if (n >= span) return 1;
    return n / span;
}

std::vector<ApplicabilityRow> applicability_table(const HardwareProfile& p, const PhyParams& phy) {
    std::vector<ApplicabilityRow> rows;
    rows.reserve(phy.rates_mbps.size());
    for (double rate : phy.rates_mbps) {
        MinPayloadQuery q;
        q.rate_data_mbps = rate;
        q.rate_ack_mbps = ack_rate_for(rate);
        q.t_sleep_min_us = p.t_sleep_min_us();
        const auto res = min_sleepable_payload(q);

        ApplicabilityRow row;
        row.rate_data_mbps = rate;
        row.rate_ack_mbps = q.rate_ack_mbps;
        row.l_min = res.l_min;
        row.applicable = res.applicable;
        row.fraction = applicable_fraction(res);
        rows.push_back(row);
    }
    return rows;
}

double clock_power_w(double freq_mhz) {
    if (freq_mhz < 0) throw DomainError("clock frequency must be non-negative");
    return 0.91 + 0.0051 * freq_mhz;
}

} // namespace micronap
