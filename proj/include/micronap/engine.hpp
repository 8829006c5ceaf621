#ifndef MICRONAP_ENGINE_HPP
#define MICRONAP_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <utility>

#include "micronap/frame.hpp"
#include "micronap/hw_profile.hpp"
#include "micronap/phy.hpp"

namespace micronap {

// Why a station declined to doze on a frame.
enum class StayReason : std::uint8_t {
    AddressedToMe,
    Multicast,
    ForeignBss,
    CtsFrame,       // CTS outside any tracked exchange: could be a CTS-to-self
    CfpNavUnusable, // reserved; TooShort covers the CFP case in practice
    TooShort,
    AlreadyAsleep,
    NoAddr2, // ACK outside any tracked exchange: transmitter unverifiable
};

const char* to_string(StayReason r);

struct SleepDecision {
    bool doze = false;
    StayReason reason = StayReason::TooShort; // valid when !doze
    std::int64_t start_us = 0;                // doze fields
    std::int64_t dt_sleep_us = 0;
    std::int64_t waste_us = 0;
    bool nav_extended = false;

    static SleepDecision stay(StayReason r) {
        SleepDecision d;
        d.doze = false;
        d.reason = r;
        return d;
    }
};

// Splits a doze into time actually spent at sleep power versus transition
// time burned at idle power.
std::pair<std::int64_t, std::int64_t> accounting_split(const SleepDecision& d,
                                                       const HardwareProfile& p);

// Per-station sleep decision state. Decisions are made once the first
// header bytes of an overheard frame are demodulated; a station that decides
// to doze is deaf until awake_until_us and by then the receiver is ready
// again (the wake trigger fires t_on + t_ready early).
class StationContext {
  public:
    StationContext(MacAddress own, MacAddress bssid, HardwareProfile profile, PhyParams phy);

    // Evaluates one captured frame. Invisible frames (started while dozing)
    // return Stay(AlreadyAsleep) and change nothing except that their tail
    // may be overheard after wake; callers account that part themselves.
    // Never call this with the station's own transmissions.
    SleepDecision on_frame(const FrameRecord& f);

    // Core of the algorithm: given the remaining on-air time of the current
    // frame, its duration field and kind, decide whether to doze. The NAV
    // only extends the nap for plain NAV values, during the contention
    // period, and never from a CTS. Dozing moves awake_until_us forward.
    SleepDecision set_sleep(std::int64_t dt_data_us, DurationId nav, FrameKind kind,
                            std::int64_t now_us);

    bool contention_allowed() const { return contention_allowed_; }
    std::int64_t awake_until_us() const { return awake_until_us_; }
    const MacAddress& own_addr() const { return own_; }
    const MacAddress& bssid() const { return bssid_; }
    const HardwareProfile& profile() const { return profile_; }

  private:
    // Response tracking so ACK/CTS frames (no transmitter address) can be
    // tied to the exchange that solicited them.
    struct Expectation {
        FrameKind kind;       // Cts or Ack
        MacAddress addr1;     // the response's receiver = prior frame's addr2
        std::int64_t from_us; // valid window for the response start
        std::int64_t until_us;
        bool bss_verified; // prior frame passed the same-BSS check
    };

    bool same_bss(const FrameRecord& f) const;
    void track_response(const FrameRecord& f, bool bss_ok);

    MacAddress own_;
    MacAddress bssid_;
    HardwareProfile profile_;
    PhyParams phy_;
    bool contention_allowed_ = true;
    std::int64_t awake_until_us_ = 0;
    std::optional<Expectation> expected_;
};

} // namespace micronap

#endif
