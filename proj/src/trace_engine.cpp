#include "micronap/trace_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "micronap/common.hpp"

namespace micronap {

const char* to_string(Variant v) { return v == Variant::Baseline ? "baseline" : "unap"; }

LedgerSide& LedgerSide::operator+=(const LedgerSide& o) {
    tx_us += o.tx_us;
    rx_us += o.rx_us;
    ov_us += o.ov_us;
    sleep_us += o.sleep_us;
    waste_us += o.waste_us;
    idle_us += o.idle_us;
    return *this;
}

// ---------------------------------------------------------------------------
// Discovery

DiscoveryResult discover(const std::vector<FrameRecord>& frames) {
    DiscoveryResult res;
    std::unordered_set<MacAddress> transmitters;

    auto associate = [&](MacAddress sta, MacAddress bssid, std::int64_t ts) {
        if (sta.multicast()) return;
        auto& id = res.stations[sta];
        id.mac = sta;
        if (id.last_assoc_us <= ts || id.bssid == MacAddress{}) {
            id.bssid = bssid;
            id.last_assoc_us = ts;
        }
    };

    for (const auto& f : frames) {
        if (f.addr2) transmitters.insert(*f.addr2);

        if (f.kind == FrameKind::Beacon && f.addr2) res.aps.insert(*f.addr2);
        if (f.from_ds && f.addr2) {
            res.aps.insert(*f.addr2);
            if (!f.addr1.multicast()) associate(f.addr1, *f.addr2, f.timestamp_us);
        }
        if (f.to_ds && !f.from_ds && f.addr2 && !f.addr1.multicast()) {
            // The receiver of a to-DS frame is the BSSID by definition.
            res.aps.insert(f.addr1);
            associate(*f.addr2, f.addr1, f.timestamp_us);
        }
    }

    for (const auto& ap : res.aps) res.stations.erase(ap);
    for (const auto& mac : transmitters)
        if (!res.aps.count(mac) && !res.stations.count(mac)) res.unassociated.insert(mac);
    return res;
}

void merge_discovery(DiscoveryResult& into, const DiscoveryResult& other) {
    for (const auto& ap : other.aps) into.aps.insert(ap);
    for (const auto& [mac, id] : other.stations) {
        auto it = into.stations.find(mac);
        if (it == into.stations.end() || it->second.last_assoc_us < id.last_assoc_us)
            into.stations[mac] = id;
    }
    for (const auto& ap : into.aps) into.stations.erase(ap);
    for (const auto& mac : other.unassociated)
        if (!into.aps.count(mac) && !into.stations.count(mac)) into.unassociated.insert(mac);
    for (const auto& ap : into.aps) into.unassociated.erase(ap);
    for (const auto& [mac, id] : into.stations) into.unassociated.erase(mac);
}

// ---------------------------------------------------------------------------
// Accounting

namespace {

// Billing priority, lowest wins when intervals overlap (overlaps only occur
// in degenerate traces; physical traffic never overlaps).
enum class SegState : std::uint8_t { Tx = 0, Sleep = 1, Waste = 2, Rx = 3, Ov = 4 };

struct Seg {
    std::int64_t s = 0;
    std::int64_t e = 0;
    SegState st = SegState::Ov;
};

struct Interval {
    std::int64_t s = 0;
    std::int64_t e = 0;
};

// Appends [s,e) to an ascending-start union, merging where they touch.
void union_push(std::vector<Interval>& u, std::int64_t s, std::int64_t e) {
    if (e <= s) return;
    if (!u.empty() && s <= u.back().e) {
        u.back().e = std::max(u.back().e, e);
        return;
    }
    u.push_back({s, e});
}

std::vector<Interval> union_merge(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        Interval next{};
        if (j >= b.size() || (i < a.size() && a[i].s <= b[j].s)) next = a[i++];
        else next = b[j++];
        union_push(out, next.s, next.e);
    }
    return out;
}

void clip_to(std::vector<Interval>& u, std::int64_t hi) {
    while (!u.empty() && u.back().s >= hi) u.pop_back();
    if (!u.empty() && u.back().e > hi) u.back().e = hi;
}

std::int64_t measure(const std::vector<Interval>& u) {
    std::int64_t m = 0;
    for (const auto& iv : u) m += iv.e - iv.s;
    return m;
}

struct SweepResult {
    std::array<std::int64_t, 5> per_state{}; // indexed by SegState
    std::int64_t busy = 0;
};

// Measures each state's time within the accountable set. Segments are
// clipped to the set first; where they overlap, the lowest state wins.
SweepResult sweep(std::vector<Seg> segs, const std::vector<Interval>& acct) {
    // clip segments to the accountable union
    std::vector<Seg> clipped;
    clipped.reserve(segs.size());
    for (const auto& sg : segs) {
        auto it = std::upper_bound(acct.begin(), acct.end(), sg.s,
                                   [](std::int64_t v, const Interval& iv) { return v < iv.s; });
        if (it != acct.begin()) --it;
        for (; it != acct.end() && it->s < sg.e; ++it) {
            const std::int64_t s = std::max(sg.s, it->s);
            const std::int64_t e = std::min(sg.e, it->e);
            if (s < e) clipped.push_back({s, e, sg.st});
        }
    }

    struct Ev {
        std::int64_t t;
        int delta;
        int st;
    };
    std::vector<Ev> evs;
    evs.reserve(clipped.size() * 2);
    for (const auto& sg : clipped) {
        evs.push_back({sg.s, +1, static_cast<int>(sg.st)});
        evs.push_back({sg.e, -1, static_cast<int>(sg.st)});
    }
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });

    SweepResult r;
    std::array<int, 5> active{};
    std::int64_t prev = 0;
    bool have_prev = false;
    std::size_t i = 0;
    while (i < evs.size()) {
        const std::int64_t t = evs[i].t;
        if (have_prev && t > prev) {
            for (int st = 0; st < 5; ++st) {
                if (active[static_cast<std::size_t>(st)] > 0) {
                    r.per_state[static_cast<std::size_t>(st)] += t - prev;
                    r.busy += t - prev;
                    break;
                }
            }
        }
        while (i < evs.size() && evs[i].t == t) {
            active[static_cast<std::size_t>(evs[i].st)] += evs[i].delta;
            ++i;
        }
        prev = t;
        have_prev = true;
    }
    return r;
}

// Channel-level transmitter attribution. ACK and CTS carry no transmitter
// address; tie them to the frame they answer, or fall back to CTS-to-self.
struct ChannelPrev {
    bool valid = false;
    std::int64_t end = 0;
    FrameKind kind = FrameKind::Other;
    MacAddress addr1;
    std::optional<MacAddress> addr2;
};

std::optional<MacAddress> attribute_tx(const FrameRecord& f, const ChannelPrev& prev,
                                       const PhyParams& phy) {
    if (f.addr2) return *f.addr2;

    const bool prev_answerable = prev.valid && prev.addr2 && !prev.addr1.multicast();
    const bool in_window = prev_answerable && f.timestamp_us >= prev.end &&
                           f.timestamp_us <= prev.end + phy.sifs_us + phy.slot_us &&
                           f.addr1 == *prev.addr2;

    if (f.kind == FrameKind::Cts) {
        if (in_window && prev.kind == FrameKind::Rts) return prev.addr1;
        return f.addr1; // CTS-to-self names its own sender
    }
    if (f.kind == FrameKind::Ack) {
        if (in_window && (prev.kind == FrameKind::Data || prev.kind == FrameKind::CfPoll ||
                          prev.kind == FrameKind::Management))
            return prev.addr1;
        return std::nullopt;
    }
    return std::nullopt;
}

struct StationAccum {
    StationIdentity id;
    StationContext ctx;
    std::int64_t last_tx_us = std::numeric_limits<std::int64_t>::min();
    bool has_tx = false;
    std::vector<Interval> online;
    std::vector<Interval> billed_spans;
    std::vector<Seg> base_segs;
    std::vector<Seg> unap_segs;
    std::int64_t frames_missed = 0;

    StationAccum(const StationIdentity& ident, const HardwareProfile& p, const PhyParams& phy)
        : id(ident), ctx(ident.mac, ident.bssid, p, phy) {}
};

void push_doze_segs(std::vector<Seg>& segs, const SleepDecision& d, const HardwareProfile& p) {
    const std::int64_t s = d.start_us;
    const std::int64_t e = d.start_us + d.dt_sleep_us;
    // Waste sits at the edges: the power-down window at the front, the
    // receiver-ready window at the tail. The power-up window draws sleep
    // power and counts as sleep.
    const std::int64_t head = s + p.t_off_us;
    const std::int64_t tail = e - p.t_ready_us;
    if (head > s) segs.push_back({s, head, SegState::Waste});
    if (tail > head) segs.push_back({head, tail, SegState::Sleep});
    if (e > tail) segs.push_back({tail, e, SegState::Waste});
}

} // namespace

std::vector<ActivityLedger> account_both(const std::vector<FrameRecord>& frames,
                                         const DiscoveryResult& discovery,
                                         const AccountConfig& config) {
    const PhyParams& phy = config.phy;
    const std::int64_t thr = config.online_threshold_us;

    // Deterministic station order for replay and decision logging.
    std::vector<StationAccum> stations;
    {
        std::vector<StationIdentity> ids;
        ids.reserve(discovery.stations.size());
        for (const auto& [mac, id] : discovery.stations) ids.push_back(id);
        std::sort(ids.begin(), ids.end(),
                  [](const StationIdentity& a, const StationIdentity& b) { return a.mac < b.mac; });
        stations.reserve(ids.size());
        for (const auto& id : ids) stations.emplace_back(id, config.profile, phy);
    }

    ChannelPrev prev;
    std::int64_t file_end = 0;

    for (const auto& f : frames) {
        const std::int64_t air = frame_airtime_us(f.psdu_len, f.rate_mbps, phy);
        const std::int64_t f_end = f.timestamp_us + air;
        file_end = std::max(file_end, f_end);
        const auto tx_mac = attribute_tx(f, prev, phy);

        for (auto& st : stations) {
            const bool is_tx = tx_mac && *tx_mac == st.id.mac;
            if (is_tx) {
                st.last_tx_us = f.timestamp_us;
                st.has_tx = true;
                union_push(st.online, f.timestamp_us, f.timestamp_us + thr);
            }
            const bool billed = st.has_tx && f.timestamp_us < st.last_tx_us + thr;
            if (billed) union_push(st.billed_spans, f.timestamp_us, f_end);

            const bool is_rx = !is_tx && !f.addr1.multicast() && f.addr1 == st.id.mac && f.fcs_ok;
            const SegState rel = is_tx ? SegState::Tx : (is_rx ? SegState::Rx : SegState::Ov);

            if (billed) st.base_segs.push_back({f.timestamp_us, f_end, rel});

            if (is_tx) {
                if (billed) st.unap_segs.push_back({f.timestamp_us, f_end, SegState::Tx});
                continue;
            }

            const SleepDecision d = st.ctx.on_frame(f);
            if (config.decision_sink)
                config.decision_sink(DecisionEvent{f.timestamp_us, st.id.mac, f.kind, d});

            if (!d.doze && d.reason == StayReason::AlreadyAsleep) {
                if (f.addr1 == st.id.mac) ++st.frames_missed;
                // The nap may end mid-frame; the tail is overheard noise.
                const std::int64_t wake = st.ctx.awake_until_us();
                if (billed && wake < f_end)
                    st.unap_segs.push_back({wake, f_end, SegState::Ov});
            } else if (d.doze) {
                if (billed) {
                    if (d.start_us > f.timestamp_us)
                        st.unap_segs.push_back({f.timestamp_us, d.start_us, SegState::Ov});
                    push_doze_segs(st.unap_segs, d, config.profile);
                }
            } else {
                if (billed) st.unap_segs.push_back({f.timestamp_us, f_end, rel});
            }
        }

        prev = ChannelPrev{true, f_end, f.kind, f.addr1, f.addr2};
    }

    std::vector<ActivityLedger> out;
    out.reserve(stations.size());
    for (auto& st : stations) {
        auto acct = union_merge(st.online, st.billed_spans);
        clip_to(acct, file_end);
        const std::int64_t acct_us = measure(acct);

        ActivityLedger led;
        led.mac = st.id.mac;
        led.frames_missed = st.frames_missed;

        const auto base = sweep(st.base_segs, acct);
        led.baseline.tx_us = base.per_state[static_cast<std::size_t>(SegState::Tx)];
        led.baseline.rx_us = base.per_state[static_cast<std::size_t>(SegState::Rx)];
        led.baseline.ov_us = base.per_state[static_cast<std::size_t>(SegState::Ov)];
        led.baseline.idle_us = acct_us - base.busy;

        const auto unap = sweep(st.unap_segs, acct);
        led.unap.tx_us = unap.per_state[static_cast<std::size_t>(SegState::Tx)];
        led.unap.rx_us = unap.per_state[static_cast<std::size_t>(SegState::Rx)];
        led.unap.ov_us = unap.per_state[static_cast<std::size_t>(SegState::Ov)];
        led.unap.sleep_us = unap.per_state[static_cast<std::size_t>(SegState::Sleep)];
        led.unap.waste_us = unap.per_state[static_cast<std::size_t>(SegState::Waste)];
        led.unap.idle_us = acct_us - unap.busy;

        out.push_back(led);
    }
    return out;
}

std::vector<ActivityLedger> account(const std::vector<FrameRecord>& frames,
                                    const DiscoveryResult& discovery, const AccountConfig& config,
                                    Variant variant) {
    auto ledgers = account_both(frames, discovery, config);
    for (auto& l : ledgers) {
        if (variant == Variant::Baseline) l.unap = LedgerSide{};
        else l.baseline = LedgerSide{};
    }
    return ledgers;
}

std::vector<ActivityLedger> merge_ledgers(const std::vector<std::vector<ActivityLedger>>& parts) {
    std::map<MacAddress, ActivityLedger> merged;
    for (const auto& part : parts) {
        for (const auto& l : part) {
            auto& m = merged[l.mac];
            m.mac = l.mac;
            m.baseline += l.baseline;
            m.unap += l.unap;
            m.frames_missed += l.frames_missed;
        }
    }
    std::vector<ActivityLedger> out;
    out.reserve(merged.size());
    for (auto& [mac, l] : merged) out.push_back(l);
    return out;
}

std::vector<ActivityLedger> upper_decile(std::vector<ActivityLedger> ledgers) {
    if (ledgers.empty()) return ledgers;

    // Rank by micro-sleep activity; fall back to baseline for ledgers that
    // carry only that side.
    bool any_unap = false;
    for (const auto& l : ledgers) any_unap = any_unap || l.unap.activity_us() > 0;
    auto rank = [&](const ActivityLedger& l) {
        return any_unap ? l.unap.activity_us() : l.baseline.activity_us();
    };

    std::vector<std::int64_t> ranks;
    ranks.reserve(ledgers.size());
    for (const auto& l : ledgers) ranks.push_back(rank(l));
    std::sort(ranks.begin(), ranks.end(), std::greater<>());

    const std::size_t k = std::max<std::size_t>(1, ledgers.size() / 10);
    const std::int64_t threshold = ranks[k - 1];

    std::vector<ActivityLedger> out;
    for (const auto& l : ledgers)
        if (rank(l) >= threshold) out.push_back(l);
    std::sort(out.begin(), out.end(),
              [](const ActivityLedger& a, const ActivityLedger& b) { return a.mac < b.mac; });
    return out;
}

double activity_energy_uj(const LedgerSide& s, const HardwareProfile& p) {
    return static_cast<double>(s.tx_us) * p.p_tx_w + static_cast<double>(s.rx_us) * p.p_rx_w +
           static_cast<double>(s.ov_us) * p.p_ov_w + static_cast<double>(s.sleep_us) * p.p_sleep_w +
           static_cast<double>(s.waste_us) * p.p_idle_w;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

constexpr double kUjPerMwh = 3.6e6; // 1 mWh = 3.6 J

} // namespace

EnergyReport energy_report(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                           double battery_volts) {
    EnergyReport rep;
    double base_total = 0, unap_total = 0, base_ov_energy = 0;
    std::int64_t base_ov_us = 0, unap_ov_us = 0;
    std::vector<double> base_frac, unap_frac;

    for (const auto& l : ledgers) {
        for (Variant v : {Variant::Baseline, Variant::Unap}) {
            const LedgerSide& s = v == Variant::Baseline ? l.baseline : l.unap;
            StationEnergy e;
            e.mac = l.mac;
            e.variant = v;
            e.energy_uj = activity_energy_uj(s, p);
            e.energy_mwh = e.energy_uj / kUjPerMwh;
            e.energy_mah = e.energy_mwh / battery_volts;
            e.idle_energy_uj = static_cast<double>(s.idle_us) * p.p_idle_w;
            rep.stations.push_back(e);
        }
        base_total += activity_energy_uj(l.baseline, p);
        unap_total += activity_energy_uj(l.unap, p);
        base_ov_energy += static_cast<double>(l.baseline.ov_us) * p.p_ov_w;
        base_ov_us += l.baseline.ov_us;
        unap_ov_us += l.unap.ov_us;
        if (l.baseline.activity_us() > 0)
            base_frac.push_back(static_cast<double>(l.baseline.ov_us) /
                                static_cast<double>(l.baseline.activity_us()));
        if (l.unap.activity_us() > 0)
            unap_frac.push_back(static_cast<double>(l.unap.ov_us) /
                                static_cast<double>(l.unap.activity_us()));
    }

    rep.total_saved_uj = base_total - unap_total;
    rep.total_saved_mah = rep.total_saved_uj / kUjPerMwh / battery_volts;
    rep.saving_pct_of_overhearing =
        base_ov_energy > 0 ? 100.0 * rep.total_saved_uj / base_ov_energy : 0;
    rep.saving_pct_of_activity = base_total > 0 ? 100.0 * rep.total_saved_uj / base_total : 0;
    rep.ov_time_reduction_pct =
        base_ov_us > 0
            ? 100.0 * static_cast<double>(base_ov_us - unap_ov_us) / static_cast<double>(base_ov_us)
            : 0;
    rep.median_ov_fraction_baseline = median(std::move(base_frac));
    rep.median_ov_fraction_unap = median(std::move(unap_frac));
    return rep;
}

} // namespace micronap
