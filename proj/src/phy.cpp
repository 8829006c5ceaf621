#include "micronap/phy.hpp"

#include "micronap/common.hpp"

namespace micronap {

std::optional<int> PhyParams::bits_per_symbol(double rate_mbps) const {
    for (double r : rates_mbps) {
        // Rates arrive either from this table or as exact halves of an
        // integer (radiotap encodes 0.5 Mbps units), so exact compare is fine.
        if (r == rate_mbps) return static_cast<int>(r * static_cast<double>(symbol_us));
    }
    return std::nullopt;
}

namespace {

std::int64_t symbols_for_bits(std::int64_t bits, int bits_per_symbol) {
    return (bits + bits_per_symbol - 1) / bits_per_symbol;
}

} // namespace

std::int64_t frame_airtime_us(std::uint32_t psdu_len, double rate_mbps, const PhyParams& phy) {
    const auto bps = phy.bits_per_symbol(rate_mbps);
    if (!bps) throw UnknownRateError(rate_mbps);
    // 16 SERVICE bits + PSDU + 6 tail bits, rounded up to whole symbols.
    const std::int64_t bits = 16 + 8 * static_cast<std::int64_t>(psdu_len) + 6;
    return phy.plcp_us + phy.symbol_us * symbols_for_bits(bits, *bps);
}

std::int64_t header_decision_time_us(std::uint32_t header_bytes, double rate_mbps,
                                     const PhyParams& phy) {
    const auto bps = phy.bits_per_symbol(rate_mbps);
    if (!bps) throw UnknownRateError(rate_mbps);
    const std::int64_t bits = 16 + 8 * static_cast<std::int64_t>(header_bytes);
    return phy.plcp_us + phy.symbol_us * symbols_for_bits(bits, *bps);
}

} // namespace micronap
