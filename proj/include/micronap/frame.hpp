#ifndef MICRONAP_FRAME_HPP
#define MICRONAP_FRAME_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "micronap/mac_address.hpp"

namespace micronap {

// The 16-bit Duration/ID field is overloaded by the MAC: plain NAV values,
// the fixed value announcing a contention-free period, and PS-Poll AIDs.
// Every raw value falls in exactly one class; 32769..49151 (reserved next to
// the fixed value) is folded into CfpFixed since no NAV or AID reading exists.
enum class DurationClass : std::uint8_t { NavDuration, CfpFixed, PsPollAid };

class DurationId {
  public:
    explicit constexpr DurationId(std::uint16_t raw = 0) : raw_(raw) {}

    std::uint16_t raw() const { return raw_; }

    DurationClass classify() const {
        if ((raw_ & 0x8000u) == 0) return DurationClass::NavDuration;
        if ((raw_ & 0x4000u) != 0) return DurationClass::PsPollAid;
        return DurationClass::CfpFixed;
    }

    bool is_nav() const { return classify() == DurationClass::NavDuration; }

    // NAV time in microseconds, 0..32767. Only meaningful for NavDuration.
    std::uint16_t nav_us() const { return raw_ & 0x7fffu; }

    // Association ID carried by PS-Poll frames (low 14 bits).
    std::uint16_t pspoll_aid() const { return raw_ & 0x3fffu; }

    auto operator<=>(const DurationId&) const = default;

  private:
    std::uint16_t raw_;
};

// Coarse frame classification; only the kinds the sleep decision cares about
// get their own value, everything else is Other.
enum class FrameKind : std::uint8_t {
    Data,
    Management,
    Beacon,
    Rts,
    Cts,
    Ack,
    CfPoll,
    CfEnd,
    Other,
};

FrameKind classify_kind(std::uint8_t type, std::uint8_t subtype);
const char* to_string(FrameKind k);

// ACK and CTS frames carry no transmitter address on air.
inline bool kind_has_addr2(FrameKind k) { return k != FrameKind::Ack && k != FrameKind::Cts; }

// One captured frame, normalized. timestamp_us marks the start of the PPDU
// (preamble) on the channel; psdu_len includes the 4-byte FCS.
struct FrameRecord {
    std::int64_t timestamp_us = 0;
    double rate_mbps = 6.0;
    std::uint32_t psdu_len = 0;
    std::uint8_t type = 0;
    std::uint8_t subtype = 0;
    FrameKind kind = FrameKind::Other;
    DurationId duration{0};
    MacAddress addr1;
    std::optional<MacAddress> addr2;
    bool to_ds = false;
    bool from_ds = false;
    bool more_frag = false;
    bool retry = false;
    bool fcs_ok = true;
    std::uint32_t source_id = 0; // index of the originating trace file
};

// Parses the first bytes of an MPDU: frame control, duration, addr1 and
// (when the frame type has one and enough bytes are present) addr2.
// Fewer than 10 bytes cannot even be classified.
enum class HeaderParseStatus : std::uint8_t { Ok, TruncatedHeader };

struct HeaderParseResult {
    HeaderParseStatus status = HeaderParseStatus::TruncatedHeader;
    FrameRecord frame; // valid only when status == Ok
};

HeaderParseResult parse_header(std::span<const std::uint8_t> bytes);

} // namespace micronap

#endif
