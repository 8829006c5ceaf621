#ifndef MICRONAP_PHY_HPP
#define MICRONAP_PHY_HPP

#include <array>
#include <cstdint>
#include <optional>

namespace micronap {

// OFDM 802.11a timing. All durations in microseconds. A data symbol lasts
// 4 us and carries rate_mbps * 4 bits; PLCP covers preamble plus SIGNAL.
struct PhyParams {
    std::int64_t sifs_us = 16;
    std::int64_t difs_us = 34;
    std::int64_t slot_us = 9;
    std::int64_t plcp_us = 20;
    std::int64_t symbol_us = 4;
    std::array<double, 8> rates_mbps{6, 9, 12, 18, 24, 36, 48, 54};

    static PhyParams ofdm_11a() { return PhyParams{}; }

    // Bits carried per symbol at the given rate, or nullopt for rates
    // outside the table (11b rates in mixed captures, malformed input).
    std::optional<int> bits_per_symbol(double rate_mbps) const;
};

// On-air time of a whole PPDU: PLCP plus the symbols covering the 16-bit
// SERVICE field, the PSDU (which includes the FCS) and 6 tail bits.
std::int64_t frame_airtime_us(std::uint32_t psdu_len, double rate_mbps, const PhyParams& phy);

// Time from PPDU start until the first header_bytes of the MPDU have been
// demodulated: PLCP plus the symbols covering SERVICE and those bytes. The
// sleep decision needs 16 bytes (frame control, duration, addr1, addr2), or
// 10 for the ACK/CTS header that has no addr2. No tail bits here, the frame
// is still in flight.
std::int64_t header_decision_time_us(std::uint32_t header_bytes, double rate_mbps,
                                     const PhyParams& phy);

} // namespace micronap

#endif
