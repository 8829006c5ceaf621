#include "micronap/frame.hpp"

namespace micronap {

FrameKind classify_kind(std::uint8_t type, std::uint8_t subtype) {
    switch (type) {
    case 0: // management
        return subtype == 8 ? FrameKind::Beacon : FrameKind::Management;
    case 1: // control
        switch (subtype) {
        case 11: return FrameKind::Rts;
        case 12: return FrameKind::Cts;
        case 13: return FrameKind::Ack;
        case 14: return FrameKind::CfEnd;
        default: return FrameKind::Other;
        }
    case 2: // data; subtypes with bit 1 carry a CF-Poll
        switch (subtype & 0x03) {
        case 2:
        case 3: return FrameKind::CfPoll;
        default: return FrameKind::Data;
        }
    default: return FrameKind::Other;
    }
}

const char* to_string(FrameKind k) {
    switch (k) {
    case FrameKind::Data: return "data";
    case FrameKind::Management: return "mgmt";
    case FrameKind::Beacon: return "beacon";
    case FrameKind::Rts: return "rts";
    case FrameKind::Cts: return "cts";
    case FrameKind::Ack: return "ack";
    case FrameKind::CfPoll: return "cfpoll";
    case FrameKind::CfEnd: return "cfend";
    case FrameKind::Other: return "other";
    }
    return "other";
}

HeaderParseResult parse_header(std::span<const std::uint8_t> bytes) {
    HeaderParseResult r;
    if (bytes.size() < 10) {
        r.status = HeaderParseStatus::TruncatedHeader;
        return r;
    }

    FrameRecord f;
    const std::uint8_t fc0 = bytes[0];
    const std::uint8_t fc1 = bytes[1];
    f.type = static_cast<std::uint8_t>((fc0 >> 2) & 0x03);
    f.subtype = static_cast<std::uint8_t>((fc0 >> 4) & 0x0f);
    f.kind = classify_kind(f.type, f.subtype);
    f.to_ds = (fc1 & 0x01) != 0;
    f.from_ds = (fc1 & 0x02) != 0;
    f.more_frag = (fc1 & 0x04) != 0;
    f.retry = (fc1 & 0x08) != 0;
    f.duration = DurationId(static_cast<std::uint16_t>(bytes[2] | (bytes[3] << 8)));

    std::array<std::uint8_t, 6> a1{};
    for (int i = 0; i < 6; ++i) a1[static_cast<std::size_t>(i)] = bytes[static_cast<std::size_t>(4 + i)];
    f.addr1 = MacAddress(a1);

    if (kind_has_addr2(f.kind) && bytes.size() >= 16) {
        std::array<std::uint8_t, 6> a2{};
        for (int i = 0; i < 6; ++i) a2[static_cast<std::size_t>(i)] = bytes[static_cast<std::size_t>(10 + i)];
        f.addr2 = MacAddress(a2);
    }

    r.status = HeaderParseStatus::Ok;
    r.frame = f;
    return r;
}

} // namespace micronap
