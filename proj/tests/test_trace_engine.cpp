#include "doctest.h"

#include <cmath>
#include <map>

#include "micronap/trace_engine.hpp"
#include "support/oracle.hpp"
#include "support/synth.hpp"

using namespace micronap;
namespace ts = micronap::testsupport;

namespace {

MacAddress mac_n(std::uint8_t n) {
    return MacAddress(std::array<std::uint8_t, 6>{0x02, 0, 0, 0, 0, n});
}

FrameRecord data_frame(std::int64_t t, MacAddress a1, MacAddress a2, bool to_ds, bool from_ds,
                       std::uint32_t len = 100, double rate = 24, std::uint16_t dur = 0) {
    FrameRecord f;
    f.timestamp_us = t;
    f.rate_mbps = rate;
    f.psdu_len = len;
    f.type = 2;
    f.subtype = 0;
    f.kind = FrameKind::Data;
    f.duration = DurationId(dur);
    f.addr1 = a1;
    f.addr2 = a2;
    f.to_ds = to_ds;
    f.from_ds = from_ds;
    return f;
}

std::map<MacAddress, MacAddress> station_map(const DiscoveryResult& d) {
    std::map<MacAddress, MacAddress> m;
    for (const auto& [mac, id] : d.stations) m[mac] = id.bssid;
    return m;
}

void check_invariants(const ActivityLedger& l) {
    for (const LedgerSide* s : {&l.baseline, &l.unap}) {
        CHECK(s->tx_us >= 0);
        CHECK(s->rx_us >= 0);
        CHECK(s->ov_us >= 0);
        CHECK(s->sleep_us >= 0);
        CHECK(s->waste_us >= 0);
        CHECK(s->idle_us >= 0);
    }
    CHECK(l.baseline.sleep_us == 0);
    CHECK(l.baseline.waste_us == 0);
    CHECK(l.baseline.total_us() == l.unap.total_us());
    CHECK(l.unap.tx_us == l.baseline.tx_us);
    CHECK(l.unap.ov_us <= l.baseline.ov_us);
    CHECK(l.unap.rx_us <= l.baseline.rx_us);
    CHECK(l.frames_missed >= 0);
}

} // namespace

TEST_CASE("discovery over generated traffic") {
    ts::SynthConfig cfg;
    cfg.seed = 9;
    cfg.exchanges = 150;
    const auto frames = ts::synth_trace(cfg);
    const auto d = discover(frames);

    CHECK(d.aps.count(ts::ap1()) == 1);
    CHECK(d.aps.count(ts::ap2()) == 1);
    CHECK(d.aps.size() == 2);

    REQUIRE(d.stations.count(ts::sta_a()) == 1);
    REQUIRE(d.stations.count(ts::sta_b()) == 1);
    REQUIRE(d.stations.count(ts::sta_c()) == 1);
    REQUIRE(d.stations.count(ts::sta_x()) == 1);
    CHECK(d.stations.size() == 4);
    CHECK(d.stations.at(ts::sta_a()).bssid == ts::ap1());
    CHECK(d.stations.at(ts::sta_b()).bssid == ts::ap1());
    CHECK(d.stations.at(ts::sta_c()).bssid == ts::ap1());
    CHECK(d.stations.at(ts::sta_x()).bssid == ts::ap2());

    CHECK(d.unassociated.empty());
}

TEST_CASE("discovery corner cases") {
    SUBCASE("empty trace") {
        const auto d = discover({});
        CHECK(d.stations.empty());
        CHECK(d.aps.empty());
        CHECK(d.unassociated.empty());
    }

    SUBCASE("a MAC that ever acts as an AP is not a station") {
        std::vector<FrameRecord> v;
        // first seen associating like a station
        v.push_back(data_frame(0, mac_n(1), mac_n(2), true, false));
        // later the same MAC beacons
        FrameRecord b;
        b.timestamp_us = 1000;
        b.rate_mbps = 6;
        b.psdu_len = 90;
        b.type = 0;
        b.subtype = 8;
        b.kind = FrameKind::Beacon;
        b.duration = DurationId(0);
        b.addr1 = ts::bcast();
        b.addr2 = mac_n(2);
        v.push_back(b);

        const auto d = discover(v);
        CHECK(d.aps.count(mac_n(1)) == 1);
        CHECK(d.aps.count(mac_n(2)) == 1);
        CHECK(d.stations.empty());
    }

    SUBCASE("most recent association wins") {
        std::vector<FrameRecord> v;
        v.push_back(data_frame(0, mac_n(1), mac_n(9), true, false));
        v.push_back(data_frame(5000, mac_n(2), mac_n(9), true, false));
        const auto d = discover(v);
        REQUIRE(d.stations.count(mac_n(9)) == 1);
        CHECK(d.stations.at(mac_n(9)).bssid == mac_n(2));
    }

    SUBCASE("transmitter with no known role is unassociated") {
        std::vector<FrameRecord> v;
        // an IBSS-style frame: neither DS bit, transmitter never maps to a BSS
        v.push_back(data_frame(0, mac_n(1), mac_n(7), false, false));
        const auto d = discover(v);
        CHECK(d.unassociated.count(mac_n(7)) == 1);
        CHECK(d.stations.empty());
        CHECK(d.aps.empty());
    }
}

TEST_CASE("discovery merge") {
    DiscoveryResult a;
    a.stations[mac_n(9)] = {mac_n(9), mac_n(1), 100};
    a.aps.insert(mac_n(1));
    a.unassociated.insert(mac_n(7));

    DiscoveryResult b;
    b.stations[mac_n(9)] = {mac_n(9), mac_n(2), 900}; // newer association
    b.aps.insert(mac_n(2));
    b.unassociated.insert(mac_n(7));
    b.unassociated.insert(mac_n(8));

    merge_discovery(a, b);
    CHECK(a.aps.size() == 2);
    REQUIRE(a.stations.count(mac_n(9)) == 1);
    CHECK(a.stations.at(mac_n(9)).bssid == mac_n(2));
    CHECK(a.unassociated.count(mac_n(7)) == 1);
    CHECK(a.unassociated.count(mac_n(8)) == 1);

    // an AP report from another file demotes nothing into a station
    DiscoveryResult c;
    c.aps.insert(mac_n(9));
    merge_discovery(a, c);
    CHECK(a.stations.count(mac_n(9)) == 0);
    CHECK(a.aps.count(mac_n(9)) == 1);
}

TEST_CASE("accounting matches the per-microsecond reference") {
    struct Combo {
        std::uint64_t seed;
        int exchanges;
        bool cfp, foreign, badfcs, pspoll;
    };
    const Combo combos[] = {
        {1, 60, true, true, true, true},    {2, 90, true, false, true, false},
        {3, 40, false, true, false, true},  {5, 120, true, true, false, false},
        {8, 75, false, false, true, true},  {13, 50, false, false, false, false},
        {21, 100, true, true, true, false}, {34, 80, true, false, false, true},
    };

    for (const auto& combo : combos) {
        CAPTURE(combo.seed);
        ts::SynthConfig cfg;
        cfg.seed = combo.seed;
        cfg.exchanges = combo.exchanges;
        cfg.include_cfp = combo.cfp;
        cfg.include_foreign = combo.foreign;
        cfg.include_badfcs = combo.badfcs;
        cfg.include_pspoll = combo.pspoll;
        const auto frames = ts::synth_trace(cfg);
        REQUIRE(!frames.empty());

        const auto disc = discover(frames);
        const auto smap = station_map(disc);
        REQUIRE(!smap.empty());

        AccountConfig ac;
        ac.profile = HardwareProfile::ar9280();
        const auto ledgers = account_both(frames, disc, ac);
        const auto ref = ts::oracle_account(frames, smap, ac.profile, ac.online_threshold_us);

        REQUIRE(ledgers.size() == ref.size());
        for (const auto& l : ledgers) {
            CAPTURE(l.mac.to_string());
            auto it = ref.find(l.mac);
            REQUIRE(it != ref.end());
            const auto& o = it->second;

            CHECK(l.baseline.tx_us == o.baseline.tx_us);
            CHECK(l.baseline.rx_us == o.baseline.rx_us);
            CHECK(l.baseline.ov_us == o.baseline.ov_us);
            CHECK(l.baseline.idle_us == o.baseline.idle_us);
            CHECK(l.unap.tx_us == o.unap.tx_us);
            CHECK(l.unap.rx_us == o.unap.rx_us);
            CHECK(l.unap.ov_us == o.unap.ov_us);
            CHECK(l.unap.sleep_us == o.unap.sleep_us);
            CHECK(l.unap.waste_us == o.unap.waste_us);
            CHECK(l.unap.idle_us == o.unap.idle_us);
            CHECK(l.frames_missed == o.frames_missed);

            check_invariants(l);
        }
    }
}

TEST_CASE("online threshold excludes quiet periods") {
    const auto ap = mac_n(1);
    const auto s = mac_n(10);
    const auto b = mac_n(11);

    std::vector<FrameRecord> v;
    v.push_back(data_frame(0, ap, s, true, false));     // s transmits, air 56
    v.push_back(data_frame(5000, ap, b, true, false));  // b transmits while s is offline
    v.push_back(data_frame(10000, ap, s, true, false)); // s returns

    const auto disc = discover(v);
    AccountConfig ac;
    ac.profile = HardwareProfile::ar9280();
    ac.online_threshold_us = 1000;
    const auto ledgers = account_both(v, disc, ac);

    REQUIRE(ledgers.size() == 2);
    const auto& ls = ledgers[0].mac == s ? ledgers[0] : ledgers[1];
    const auto& lb = ledgers[0].mac == s ? ledgers[1] : ledgers[0];
    REQUIRE(ls.mac == s);
    REQUIRE(lb.mac == b);

    // accountable time for s: [0,1000) plus [10000,10056) of the last frame
    CHECK(ls.baseline.tx_us == 112);
    CHECK(ls.baseline.ov_us == 0); // the 5000 us frame fell outside
    CHECK(ls.baseline.idle_us == 944);
    CHECK(ls.baseline.total_us() == 1056);
    CHECK(ls.unap.total_us() == 1056);
    CHECK(ls.unap.tx_us == 112);

    // b: online [5000,6000), never billed for the others' frames
    CHECK(lb.baseline.tx_us == 56);
    CHECK(lb.baseline.ov_us == 0);
    CHECK(lb.baseline.idle_us == 944);
    CHECK(lb.baseline.total_us() == 1000);

    check_invariants(ls);
    check_invariants(lb);
}

TEST_CASE("missed frames are counted and their tails overheard") {
    const auto ap = mac_n(1);
    const auto a = mac_n(10);
    const auto b = mac_n(11);

    std::vector<FrameRecord> v;
    v.push_back(data_frame(0, ap, a, true, false)); // a online, air 56
    // long downlink to b: a dozes at 244 until 2300
    v.push_back(data_frame(200, b, ap, false, true, 1500, 6, 60));
    // downlink to a lands inside the doze, ends at 2438
    v.push_back(data_frame(2250, a, ap, false, true, 500, 24, 0));

    const auto disc = discover(v);
    REQUIRE(disc.stations.size() == 2);

    AccountConfig ac;
    ac.profile = HardwareProfile::ar9280();
    const auto ledgers = account_both(v, disc, ac);
    REQUIRE(ledgers.size() == 2);
    const auto& la = ledgers[0].mac == a ? ledgers[0] : ledgers[1];
    const auto& lb = ledgers[0].mac == a ? ledgers[1] : ledgers[0];
    REQUIRE(la.mac == a);

    CHECK(la.frames_missed == 1);

    CHECK(la.baseline.tx_us == 56);
    CHECK(la.baseline.ov_us == 2024);
    CHECK(la.baseline.rx_us == 188);
    CHECK(la.baseline.idle_us == 170);
    CHECK(la.baseline.total_us() == 2438);

    CHECK(la.unap.tx_us == 56);
    CHECK(la.unap.ov_us == 44 + 138); // pre-decision header, then the tail after wake
    CHECK(la.unap.sleep_us == 1806);
    CHECK(la.unap.waste_us == 250);
    CHECK(la.unap.rx_us == 0); // the frame addressed to it started mid-doze
    CHECK(la.unap.idle_us == 144);
    CHECK(la.unap.total_us() == 2438);

    // b never transmits: no accountable time at all
    CHECK(lb.frames_missed == 0);
    CHECK(lb.baseline.total_us() == 0);
    CHECK(lb.unap.total_us() == 0);

    check_invariants(la);
    check_invariants(lb);
}

TEST_CASE("decision sink sees every evaluated frame") {
    ts::SynthConfig cfg;
    cfg.seed = 4;
    cfg.exchanges = 80;
    const auto frames = ts::synth_trace(cfg);
    const auto disc = discover(frames);

    std::vector<DecisionEvent> events;
    AccountConfig ac;
    ac.profile = HardwareProfile::ar9280();
    ac.decision_sink = [&](const DecisionEvent& e) { events.push_back(e); };
    (void)account_both(frames, disc, ac);

    REQUIRE(!events.empty());
    int dozes = 0, asleep = 0;
    for (const auto& e : events) {
        CHECK(disc.stations.count(e.station) == 1);
        if (e.decision.doze) {
            ++dozes;
            CHECK(e.decision.dt_sleep_us >= 300);
            CHECK(e.decision.waste_us == 250);
            CHECK(e.decision.start_us >= e.timestamp_us);
        } else if (e.decision.reason == StayReason::AlreadyAsleep) {
            ++asleep;
        }
    }
    CHECK(dozes > 0);
    CHECK(asleep > 0);
}

TEST_CASE("single-variant wrapper zeroes the other side") {
    ts::SynthConfig cfg;
    cfg.seed = 6;
    cfg.exchanges = 30;
    const auto frames = ts::synth_trace(cfg);
    const auto disc = discover(frames);
    AccountConfig ac;
    ac.profile = HardwareProfile::ar9280();

    const auto base_only = account(frames, disc, ac, Variant::Baseline);
    for (const auto& l : base_only) {
        CHECK(l.unap.total_us() == 0);
        CHECK(l.baseline.total_us() > 0);
    }
    const auto unap_only = account(frames, disc, ac, Variant::Unap);
    for (const auto& l : unap_only) CHECK(l.baseline.total_us() == 0);
}

TEST_CASE("ledger merge sums per MAC") {
    ActivityLedger a1;
    a1.mac = mac_n(1);
    a1.baseline.tx_us = 10;
    a1.unap.sleep_us = 5;
    a1.frames_missed = 1;

    ActivityLedger b1;
    b1.mac = mac_n(2);
    b1.baseline.ov_us = 7;

    ActivityLedger a2;
    a2.mac = mac_n(1);
    a2.baseline.tx_us = 7;
    a2.unap.sleep_us = 3;
    a2.frames_missed = 2;

    const auto merged = merge_ledgers({{a1, b1}, {a2}});
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].mac == mac_n(1));
    CHECK(merged[0].baseline.tx_us == 17);
    CHECK(merged[0].unap.sleep_us == 8);
    CHECK(merged[0].frames_missed == 3);
    CHECK(merged[1].mac == mac_n(2));
    CHECK(merged[1].baseline.ov_us == 7);

    CHECK(merge_ledgers({}).empty());
}

TEST_CASE("upper decile") {
    auto mk = [](std::uint8_t n, std::int64_t unap_ov, std::int64_t base_ov = 0) {
        ActivityLedger l;
        l.mac = mac_n(n);
        l.unap.ov_us = unap_ov;
        l.baseline.ov_us = base_ov;
        return l;
    };

    SUBCASE("top tenth of 25, distinct activities") {
        std::vector<ActivityLedger> v;
        for (std::uint8_t i = 0; i < 25; ++i)
            v.push_back(mk(i, 1000 * (static_cast<std::int64_t>(i) + 1)));
        const auto top = upper_decile(v);
        REQUIRE(top.size() == 2); // k = max(1, 25/10)
        CHECK(top[0].mac == mac_n(23));
        CHECK(top[1].mac == mac_n(24));
    }

    SUBCASE("ties at the threshold are kept") {
        std::vector<ActivityLedger> v;
        for (std::uint8_t i = 0; i < 25; ++i) v.push_back(mk(i, 500));
        CHECK(upper_decile(v).size() == 25);
    }

    SUBCASE("small populations keep at least one") {
        std::vector<ActivityLedger> v;
        for (std::uint8_t i = 0; i < 5; ++i)
            v.push_back(mk(i, 100 * (static_cast<std::int64_t>(i) + 1)));
        const auto top = upper_decile(v);
        REQUIRE(top.size() == 1);
        CHECK(top[0].mac == mac_n(4));
    }

    SUBCASE("baseline ranks when no micro-sleep side exists") {
        std::vector<ActivityLedger> v;
        for (std::uint8_t i = 0; i < 12; ++i)
            v.push_back(mk(i, 0, 100 * (static_cast<std::int64_t>(i) + 1)));
        const auto top = upper_decile(v);
        REQUIRE(top.size() == 1);
        CHECK(top[0].mac == mac_n(11));
    }

    SUBCASE("empty input") { CHECK(upper_decile({}).empty()); }
}

TEST_CASE("energy report") {
    const auto p = HardwareProfile::ar9280();

    SUBCASE("one hour of pure overhearing") {
        ActivityLedger l;
        l.mac = mac_n(1);
        l.baseline.ov_us = 3'600'000'000;
        l.unap.sleep_us = 3'600'000'000;

        const auto rep = energy_report({l}, p, 3.7);
        REQUIRE(rep.stations.size() == 2);
        const auto& base = rep.stations[0];
        CHECK(base.variant == Variant::Baseline);
        CHECK(base.energy_uj == doctest::Approx(3.6e9 * 1.371));
        CHECK(base.energy_mwh == doctest::Approx(1371.0));
        CHECK(base.energy_mah == doctest::Approx(370.5405405));

        const auto& unap = rep.stations[1];
        CHECK(unap.energy_mwh == doctest::Approx(424.0));

        CHECK(rep.total_saved_uj == doctest::Approx(3.6e9 * (1.371 - 0.424)));
        CHECK(rep.total_saved_mah == doctest::Approx((1371.0 - 424.0) / 3.7));
        CHECK(rep.saving_pct_of_overhearing == doctest::Approx(100.0 * (1.371 - 0.424) / 1.371));
        CHECK(rep.saving_pct_of_activity == doctest::Approx(100.0 * (1.371 - 0.424) / 1.371));
        CHECK(rep.ov_time_reduction_pct == doctest::Approx(100.0));
        CHECK(rep.median_ov_fraction_baseline == doctest::Approx(1.0));
        CHECK(rep.median_ov_fraction_unap == doctest::Approx(0.0));
    }

    SUBCASE("idle energy is separate from activity energy") {
        ActivityLedger l;
        l.mac = mac_n(2);
        l.baseline.tx_us = 1000;
        l.baseline.idle_us = 2000;
        l.unap = l.baseline;

        const auto rep = energy_report({l}, p, 3.7);
        CHECK(rep.stations[0].energy_uj == doctest::Approx(1000 * 3.10));
        CHECK(rep.stations[0].idle_energy_uj == doctest::Approx(2000 * 1.292));
        CHECK(rep.total_saved_uj == doctest::Approx(0.0));
    }

    SUBCASE("waste is billed at idle power") {
        ActivityLedger l;
        l.mac = mac_n(3);
        l.unap.waste_us = 1000;
        const auto rep = energy_report({l}, p, 3.7);
        CHECK(rep.stations[1].energy_uj == doctest::Approx(1000 * 1.292));
    }

    SUBCASE("empty report") {
        const auto rep = energy_report({}, p, 3.7);
        CHECK(rep.stations.empty());
        CHECK(rep.total_saved_uj == 0.0);
        CHECK(rep.saving_pct_of_overhearing == 0.0);
    }
}

TEST_CASE("activity energy arithmetic") {
    const auto p = HardwareProfile::ar9280();
    LedgerSide s;
    s.tx_us = 10;
    s.rx_us = 20;
    s.ov_us = 30;
    s.sleep_us = 40;
    s.waste_us = 50;
    s.idle_us = 1000; // not part of activity energy
    const double expect =
        10 * 3.10 + 20 * 1.373 + 30 * 1.371 + 40 * 0.424 + 50 * 1.292;
    CHECK(activity_energy_uj(s, p) == doctest::Approx(expect).epsilon(1e-12));
}
