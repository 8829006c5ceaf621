#ifndef MICRONAP_TRACE_ENGINE_HPP
#define MICRONAP_TRACE_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "micronap/engine.hpp"
#include "micronap/frame.hpp"
#include "micronap/hw_profile.hpp"
#include "micronap/phy.hpp"

namespace micronap {

inline constexpr std::int64_t kDefaultOnlineThresholdUs = 300'000'000; // 5 min

enum class Variant : std::uint8_t { Baseline, Unap };
const char* to_string(Variant v);

// Who a MAC is: an AP (beacon sender or from-DS transmitter) or a station
// associated to a BSSID. Stations keep the most recent association seen.
struct StationIdentity {
    MacAddress mac;
    MacAddress bssid;
    std::int64_t last_assoc_us = 0;
};

struct DiscoveryResult {
    std::unordered_map<MacAddress, StationIdentity> stations; // associated, non-AP
    std::unordered_set<MacAddress> aps;
    std::unordered_set<MacAddress> unassociated; // seen transmitting, no BSS mapping
};

// Walks a trace and maps MACs to roles. APs are recognized by beacon or
// from-DS transmissions, stations by to-DS transmissions or by being the
// unicast target of a from-DS frame.
DiscoveryResult discover(const std::vector<FrameRecord>& frames);
void merge_discovery(DiscoveryResult& into, const DiscoveryResult& other);

// Time per state, integral microseconds. activity excludes idle.
struct LedgerSide {
    std::int64_t tx_us = 0;
    std::int64_t rx_us = 0;
    std::int64_t ov_us = 0;
    std::int64_t sleep_us = 0;
    std::int64_t waste_us = 0;
    std::int64_t idle_us = 0;

    std::int64_t activity_us() const { return tx_us + rx_us + ov_us + sleep_us + waste_us; }
    std::int64_t total_us() const { return activity_us() + idle_us; }

    LedgerSide& operator+=(const LedgerSide& o);
};

struct ActivityLedger {
    MacAddress mac;
    LedgerSide baseline;
    LedgerSide unap;
    std::int64_t frames_missed = 0; // own-addressed same-BSS frames starting inside a doze
};

// Sink for per-frame decisions, used by the decision log and by tests.
struct DecisionEvent {
    std::int64_t timestamp_us = 0; // frame start
    MacAddress station;
    FrameKind frame_kind = FrameKind::Other;
    SleepDecision decision;
};
using DecisionSink = std::function<void(const DecisionEvent&)>;

struct AccountConfig {
    HardwareProfile profile;
    PhyParams phy = PhyParams::ofdm_11a();
    std::int64_t online_threshold_us = kDefaultOnlineThresholdUs;
    DecisionSink decision_sink; // optional
};

// Replays one trace file and charges every online station's time to
// tx/rx/ov (baseline) plus sleep/waste under the micro-sleep engine.
//
// Rules, in brief: a station is online while its last transmission is less
// than the threshold old; frames are attributed whole by the station's
// status at frame start; offline time is excluded from every state; idle is
// online time not covered by frames or dozes, and stops at the last frame's
// end. ACK/CTS transmitters are inferred from the preceding exchange.
// Stations transmit their own frames (tx) and never doze through them;
// multicast and broadcast traffic is overhearing for everyone else.
//
// The result covers both variants so callers never pay two replays, but
// account() below matches the one-variant signature.
std::vector<ActivityLedger> account_both(const std::vector<FrameRecord>& frames,
                                         const DiscoveryResult& discovery,
                                         const AccountConfig& config);

std::vector<ActivityLedger> account(const std::vector<FrameRecord>& frames,
                                    const DiscoveryResult& discovery, const AccountConfig& config,
                                    Variant variant);

// Sums per-MAC ledgers across files. Integer arithmetic, so merge order
// cannot change anything.
std::vector<ActivityLedger> merge_ledgers(const std::vector<std::vector<ActivityLedger>>& parts);

// Stations in the top tenth by activity (micro-sleep variant), ties kept:
// threshold is the k-th largest activity with k = max(1, n/10).
std::vector<ActivityLedger> upper_decile(std::vector<ActivityLedger> ledgers);

// Energy accounting over a ledger. Activity energy bills tx/rx/ov/sleep at
// their own powers and waste at idle power; idle time is reported separately.
struct StationEnergy {
    MacAddress mac;
    Variant variant = Variant::Baseline;
    double energy_uj = 0; // activity energy
    double energy_mwh = 0;
    double energy_mah = 0;
    double idle_energy_uj = 0;
};

struct EnergyReport {
    std::vector<StationEnergy> stations; // baseline+unap rows per MAC
    // Aggregate savings, baseline minus micro-sleep, over activity energy.
    double total_saved_uj = 0;
    double total_saved_mah = 0;
    double saving_pct_of_overhearing = 0; // vs baseline overhearing energy
    double saving_pct_of_activity = 0;    // vs baseline activity energy
    double ov_time_reduction_pct = 0;     // aggregate overhearing time drop
    double median_ov_fraction_baseline = 0; // median per-station ov/activity
    double median_ov_fraction_unap = 0;
};

double activity_energy_uj(const LedgerSide& s, const HardwareProfile& p);
EnergyReport energy_report(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                           double battery_volts = 3.7);

} // namespace micronap

#endif
