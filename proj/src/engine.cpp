#include "micronap/engine.hpp"

#include <algorithm>

#include "micronap/common.hpp"

namespace micronap {

const char* to_string(StayReason r) {
    switch (r) {
    case StayReason::AddressedToMe: return "addressed_to_me";
    case StayReason::Multicast: return "multicast";
    case StayReason::ForeignBss: return "foreign_bss";
    case StayReason::CtsFrame: return "cts_frame";
    case StayReason::CfpNavUnusable: return "cfp_nav_unusable";
    case StayReason::TooShort: return "too_short";
    case StayReason::AlreadyAsleep: return "already_asleep";
    case StayReason::NoAddr2: return "no_addr2";
    }
    return "unknown";
}

std::pair<std::int64_t, std::int64_t> accounting_split(const SleepDecision& d,
                                                       const HardwareProfile& p) {
    if (!d.doze) return {0, 0};
    (void)p; // waste was frozen from the profile when the doze was issued
    return {d.dt_sleep_us - d.waste_us, d.waste_us};
}

StationContext::StationContext(MacAddress own, MacAddress bssid, HardwareProfile profile,
                               PhyParams phy)
    : own_(own), bssid_(bssid), profile_(std::move(profile)), phy_(phy) {}

bool StationContext::same_bss(const FrameRecord& f) const {
    switch (f.kind) {
    case FrameKind::Data:
    case FrameKind::CfPoll:
        // WDS (both DS bits) and IBSS (neither) traffic is not sleepable.
        if (f.to_ds && f.from_ds) return false;
        if (f.to_ds) return f.addr1 == bssid_;
        if (f.from_ds) return f.addr2 && *f.addr2 == bssid_;
        return false;
    case FrameKind::Ack:
    case FrameKind::Cts:
        return false; // resolved through exchange tracking, not here
    default:
        // Management and addressed control frames involve the AP directly.
        return f.addr1 == bssid_ || (f.addr2 && *f.addr2 == bssid_);
    }
}

void StationContext::track_response(const FrameRecord& f, bool bss_ok) {
    expected_.reset();
    if (!f.addr2 || f.addr1.multicast() || f.addr1 == own_) return;

    FrameKind response;
    switch (f.kind) {
    case FrameKind::Rts: response = FrameKind::Cts; break;
    case FrameKind::Data:
    case FrameKind::CfPoll:
    case FrameKind::Management: response = FrameKind::Ack; break;
    default: return;
    }

    std::int64_t end;
    try {
        end = f.timestamp_us + frame_airtime_us(f.psdu_len, f.rate_mbps, phy_);
    } catch (const UnknownRateError&) {
        return;
    }
    // A response starts one SIFS after the soliciting frame; contention
    // traffic cannot appear before DIFS, so SIFS+slot bounds the window.
    expected_ = Expectation{response, *f.addr2, end, end + phy_.sifs_us + phy_.slot_us, bss_ok};
}

SleepDecision StationContext::on_frame(const FrameRecord& f) {
    if (f.timestamp_us < awake_until_us_) return SleepDecision::stay(StayReason::AlreadyAsleep);

    // The CFP announcement rides on beacons: the fixed duration value opens
    // a contention-free period, any other beacon restores contention.
    if (f.kind == FrameKind::Beacon) contention_allowed_ = f.duration.raw() != 32768;

    // Check the pending response expectation before this frame replaces it.
    bool matched = false;
    bool matched_bss = false;
    if ((f.kind == FrameKind::Ack || f.kind == FrameKind::Cts) && expected_ &&
        expected_->kind == f.kind && expected_->addr1 == f.addr1 &&
        f.timestamp_us >= expected_->from_us && f.timestamp_us <= expected_->until_us) {
        matched = true;
        matched_bss = expected_->bss_verified;
    }

    const bool bss_ok =
        (f.kind == FrameKind::Ack || f.kind == FrameKind::Cts) ? matched_bss : same_bss(f);

    SleepDecision out;
    if (f.addr1 == own_) {
        out = SleepDecision::stay(StayReason::AddressedToMe);
    } else if (f.addr1.multicast()) {
        out = SleepDecision::stay(StayReason::Multicast);
    } else if (f.kind == FrameKind::Ack || f.kind == FrameKind::Cts) {
        if (!matched) {
            // A lone CTS may be a CTS-to-self announcing the sender's own
            // transmission; a lone ACK has an unverifiable transmitter.
            out = SleepDecision::stay(f.kind == FrameKind::Cts ? StayReason::CtsFrame
                                                               : StayReason::NoAddr2);
        } else if (!matched_bss) {
            out = SleepDecision::stay(StayReason::ForeignBss);
        } else {
            const std::int64_t hdr = header_decision_time_us(10, f.rate_mbps, phy_);
            const std::int64_t air = frame_airtime_us(f.psdu_len, f.rate_mbps, phy_);
            out = set_sleep(std::max<std::int64_t>(0, air - hdr), f.duration, f.kind,
                            f.timestamp_us + hdr);
        }
    } else if (!bss_ok) {
        out = SleepDecision::stay(StayReason::ForeignBss);
    } else {
        const std::int64_t hdr = header_decision_time_us(16, f.rate_mbps, phy_);
        const std::int64_t air = frame_airtime_us(f.psdu_len, f.rate_mbps, phy_);
        out = set_sleep(std::max<std::int64_t>(0, air - hdr), f.duration, f.kind,
                        f.timestamp_us + hdr);
    }

    track_response(f, bss_ok);
    return out;
}

SleepDecision StationContext::set_sleep(std::int64_t dt_data_us, DurationId nav, FrameKind kind,
                                        std::int64_t now_us) {
    // The duration field only extends the nap when it is a plain NAV value,
    // outside contention-free periods (the station must stay pollable), and
    // never from a CTS, whose reservation may cover a transmission that
    // turns out to be addressed to us.
    const bool nav_usable = nav.is_nav() && contention_allowed_ && kind != FrameKind::Cts;
    const std::int64_t nav_us = nav_usable ? nav.nav_us() : 0;

    // Sleep through the rest of the frame, the reservation if usable, and
    // the SIFS that must pass before anyone answers.
    const std::int64_t candidate = dt_data_us + nav_us + phy_.sifs_us;
    if (candidate < profile_.t_sleep_min_us()) return SleepDecision::stay(StayReason::TooShort);

    SleepDecision d;
    d.doze = true;
    d.start_us = now_us;
    d.dt_sleep_us = candidate;
    d.waste_us = profile_.t_waste_us();
    d.nav_extended = nav_usable && nav_us > 0;
    awake_until_us_ = std::max(awake_until_us_, now_us + candidate);
    return d;
}

} // namespace micronap
