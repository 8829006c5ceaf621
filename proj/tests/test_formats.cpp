#include "doctest.h"

#include <fstream>

#include "micronap/common.hpp"
#include "micronap/trace_io.hpp"
#include "support/encode.hpp"
#include "support/synth.hpp"
#include "support/temp.hpp"

using namespace micronap;
namespace ts = micronap::testsupport;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void compare_frames(const std::vector<FrameRecord>& got, const std::vector<FrameRecord>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CAPTURE(i);
        const auto& g = got[i];
        const auto& w = want[i];
        CHECK(g.timestamp_us == w.timestamp_us);
        CHECK(g.rate_mbps == w.rate_mbps);
        CHECK(g.psdu_len == w.psdu_len);
        CHECK(g.type == w.type);
        CHECK(g.subtype == w.subtype);
        CHECK(g.kind == w.kind);
        CHECK(g.duration.raw() == w.duration.raw());
        CHECK(g.addr1 == w.addr1);
        CHECK(g.addr2.has_value() == w.addr2.has_value());
        if (g.addr2 && w.addr2) CHECK(*g.addr2 == *w.addr2);
        CHECK(g.to_ds == w.to_ds);
        CHECK(g.from_ds == w.from_ds);
        CHECK(g.more_frag == w.more_frag);
        CHECK(g.retry == w.retry);
        CHECK(g.fcs_ok == w.fcs_ok);
    }
}

} // namespace

TEST_CASE("ndjson round trip") {
    ts::SynthConfig cfg;
    cfg.seed = 7;
    cfg.exchanges = 60;
    const auto frames = ts::synth_trace(cfg);

    ts::TempDir tmp;
    const auto path = tmp.file("trace.ndjson");
    write_ndjson(path, frames);

    IngestStats stats;
    const auto back = read_ndjson(path, 3, stats);
    compare_frames(back, frames);
    CHECK(stats.frames == frames.size());
    CHECK(stats.skipped_malformed == 0);
    CHECK(stats.skipped_truncated == 0);
    CHECK(stats.missing_rate == 0);
    CHECK(stats.unknown_rate == 0);
    for (const auto& f : back) CHECK(f.source_id == 3);
}

TEST_CASE("json line format is stable") {
    FrameRecord f;
    f.timestamp_us = 12345;
    f.rate_mbps = 24;
    f.psdu_len = 1500;
    f.type = 2;
    f.subtype = 0;
    f.kind = FrameKind::Data;
    f.to_ds = true;
    f.duration = DurationId(60);
    f.addr1 = *MacAddress::parse("02:00:00:00:00:01");
    f.addr2 = *MacAddress::parse("02:00:00:00:00:0a");
    f.fcs_ok = true;

    CHECK(frame_to_json_line(f) ==
          R"({"timestamp_us":12345,"rate":24.0,"len":1500,"type":2,"subtype":0,"flags":1,)"
          R"("duration_raw":60,"addr1":"02:00:00:00:00:01","addr2":"02:00:00:00:00:0a",)"
          R"("fcs_ok":true})");

    FrameRecord ack;
    ack.timestamp_us = 20000;
    ack.rate_mbps = 6;
    ack.psdu_len = 14;
    ack.type = 1;
    ack.subtype = 13;
    ack.kind = FrameKind::Ack;
    ack.duration = DurationId(0);
    ack.addr1 = *MacAddress::parse("02:00:00:00:00:0a");
    CHECK(frame_to_json_line(ack) ==
          R"({"timestamp_us":20000,"rate":6.0,"len":14,"type":1,"subtype":13,"flags":0,)"
          R"("duration_raw":0,"addr1":"02:00:00:00:00:0a","addr2":null,"fcs_ok":true})");
}

TEST_CASE("ndjson tolerates junk and counts it") {
    ts::TempDir tmp;
    const auto path = tmp.file("mixed.ndjson");
    write_text(
        path,
        R"({"timestamp_us":10,"rate":24,"len":100,"type":2,"subtype":0,"duration_raw":0,"addr1":"02:00:00:00:00:01","addr2":"02:00:00:00:00:02"})"
        "\n"
        "this is not json\n"
        "[1,2,3]\n"
        R"({"timestamp_us":15})"
        "\n"
        R"({"timestamp_us":16,"rate":24,"len":100,"type":2,"subtype":0,"duration_raw":0,"addr1":"zz:bad","addr2":null})"
        "\n"
        "\n"
        R"({"timestamp_us":20,"rate":11,"len":100,"type":2,"subtype":0,"duration_raw":0,"addr1":"02:00:00:00:00:01","addr2":null})"
        "\n"
        R"({"timestamp_us":30,"len":100,"type":2,"subtype":0,"duration_raw":0,"addr1":"02:00:00:00:00:01","addr2":null})"
        "\n");

    IngestStats stats;
    const auto frames = read_ndjson(path, 0, stats);
    REQUIRE(frames.size() == 3);
    CHECK(stats.frames == 3);
    CHECK(stats.skipped_malformed == 4);
    CHECK(stats.unknown_rate == 1);
    CHECK(stats.missing_rate == 1);

    // the 11 Mbps record and the rate-less record both land on 6
    CHECK(frames[1].rate_mbps == 6.0);
    CHECK(frames[2].rate_mbps == 6.0);
    CHECK(frames[0].rate_mbps == 24.0);
}

TEST_CASE("ndjson defaults and addr2 stripping") {
    ts::TempDir tmp;
    const auto path = tmp.file("t.ndjson");
    // flags and fcs_ok omitted; an ACK with a spurious addr2
    write_text(
        path,
        R"({"timestamp_us":5,"rate":6,"len":14,"type":1,"subtype":13,"duration_raw":0,"addr1":"02:00:00:00:00:01","addr2":"02:00:00:00:00:02"})"
        "\n");
    IngestStats stats;
    const auto frames = read_ndjson(path, 0, stats);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].kind == FrameKind::Ack);
    CHECK_FALSE(frames[0].addr2.has_value());
    CHECK_FALSE(frames[0].to_ds);
    CHECK(frames[0].fcs_ok);
}

TEST_CASE("ndjson rejects time travel") {
    ts::TempDir tmp;
    const auto path = tmp.file("t.ndjson");
    write_text(
        path,
        R"({"timestamp_us":100,"rate":6,"len":14,"type":1,"subtype":13,"duration_raw":0,"addr1":"02:00:00:00:00:01"})"
        "\n"
        R"({"timestamp_us":50,"rate":6,"len":14,"type":1,"subtype":13,"duration_raw":0,"addr1":"02:00:00:00:00:01"})"
        "\n");
    IngestStats stats;
    CHECK_THROWS_AS(read_ndjson(path, 0, stats), InputError);

    CHECK_THROWS_AS(read_ndjson(tmp.file("missing.ndjson"), 0, stats), InputError);
}

TEST_CASE("pcap round trips") {
    ts::SynthConfig cfg;
    cfg.seed = 11;
    cfg.exchanges = 40;
    const auto frames = ts::synth_trace(cfg);
    ts::TempDir tmp;

    SUBCASE("little endian, microseconds") {
        const auto path = tmp.file("a.pcap");
        ts::write_pcap(path, frames);
        IngestStats stats;
        compare_frames(read_pcap(path, 0, stats), frames);
        CHECK(stats.frames == frames.size());
        CHECK(stats.missing_rate == 0);
    }

    SUBCASE("big endian") {
        ts::PcapWriteOptions opt;
        opt.big_endian = true;
        const auto path = tmp.file("b.pcap");
        ts::write_pcap(path, frames, opt);
        IngestStats stats;
        compare_frames(read_pcap(path, 0, stats), frames);
    }

    SUBCASE("nanosecond resolution") {
        ts::PcapWriteOptions opt;
        opt.nanosecond = true;
        const auto path = tmp.file("c.pcap");
        ts::write_pcap(path, frames, opt);
        IngestStats stats;
        compare_frames(read_pcap(path, 0, stats), frames);
    }

    SUBCASE("timestamps fall back to the pcap header without TSFT") {
        ts::PcapWriteOptions opt;
        opt.include_tsft = false;
        const auto path = tmp.file("d.pcap");
        ts::write_pcap(path, frames, opt);
        IngestStats stats;
        compare_frames(read_pcap(path, 0, stats), frames);
    }

    SUBCASE("missing rate defaults to 6 and is counted") {
        ts::PcapWriteOptions opt;
        opt.include_rate = false;
        const auto path = tmp.file("e.pcap");
        ts::write_pcap(path, frames, opt);
        IngestStats stats;
        const auto back = read_pcap(path, 0, stats);
        REQUIRE(back.size() == frames.size());
        CHECK(stats.missing_rate == frames.size());
        for (const auto& f : back) CHECK(f.rate_mbps == 6.0);
    }

    SUBCASE("stripped FCS is added back to the PSDU length") {
        ts::PcapWriteOptions opt;
        opt.fcs_at_end = false;
        const auto path = tmp.file("f.pcap");
        ts::write_pcap(path, frames, opt);
        IngestStats stats;
        compare_frames(read_pcap(path, 0, stats), frames);
    }
}

TEST_CASE("pcap error handling") {
    ts::TempDir tmp;

    SUBCASE("not a pcap") {
        const auto path = tmp.file("x.pcap");
        write_text(path, "hello");
        IngestStats stats;
        CHECK_THROWS_AS(read_pcap(path, 0, stats), InputError);
    }

    SUBCASE("unknown magic") {
        const auto path = tmp.file("x.pcap");
        write_text(path, std::string(24, '\0'));
        IngestStats stats;
        CHECK_THROWS_AS(read_pcap(path, 0, stats), InputError);
    }

    SUBCASE("record longer than the file") {
        FrameRecord ack;
        ack.timestamp_us = 5;
        ack.rate_mbps = 6;
        ack.psdu_len = 14;
        ack.type = 1;
        ack.subtype = 13;
        ack.kind = FrameKind::Ack;
        ack.addr1 = ts::sta_a();
        const auto path = tmp.file("t.pcap");
        ts::write_pcap(path, {ack});

        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        bytes.resize(bytes.size() - 4); // chop the tail off the only record
        const auto cut = tmp.file("cut.pcap");
        write_text(cut, bytes);
        IngestStats stats;
        CHECK_THROWS_AS(read_pcap(cut, 0, stats), InputError);
    }

    SUBCASE("bad radiotap version is skipped") {
        FrameRecord ack;
        ack.timestamp_us = 5;
        ack.rate_mbps = 6;
        ack.psdu_len = 14;
        ack.type = 1;
        ack.subtype = 13;
        ack.kind = FrameKind::Ack;
        ack.addr1 = ts::sta_a();
        const auto path = tmp.file("t.pcap");
        ts::write_pcap(path, {ack});

        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        bytes[24 + 16] = 1; // radiotap version of the first record
        const auto bad = tmp.file("bad.pcap");
        write_text(bad, bytes);
        IngestStats stats;
        const auto frames = read_pcap(bad, 0, stats);
        CHECK(frames.empty());
        CHECK(stats.skipped_malformed == 1);
    }

    SUBCASE("runt MPDU is counted as truncated") {
        // hand-assemble: valid radiotap (8 bytes, nothing present) + 4 bytes
        std::string b;
        auto u32 = [&](std::uint32_t v) {
            for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
        };
        auto u16 = [&](std::uint16_t v) {
            b.push_back(static_cast<char>(v & 0xff));
            b.push_back(static_cast<char>(v >> 8));
        };
        u32(0xa1b2c3d4u);
        u16(2);
        u16(4);
        u32(0);
        u32(0);
        u32(65535);
        u32(127);
        u32(0); // ts sec
        u32(0); // ts usec
        u32(12);
        u32(12);
        b += std::string("\x00\x00\x08\x00", 4); // radiotap v0, len 8
        b += std::string(8, '\x00');             // present=0, then 4 runt bytes
        const auto path = tmp.file("runt.pcap");
        write_text(path, b);
        IngestStats stats;
        const auto frames = read_pcap(path, 0, stats);
        CHECK(frames.empty());
        CHECK(stats.skipped_truncated == 1);
    }
}

TEST_CASE("bare 802.11 linktype") {
    // one data frame, linktype 105, no radiotap, FCS not in the capture
    std::string b;
    auto u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u16 = [&](std::uint16_t v) {
        b.push_back(static_cast<char>(v & 0xff));
        b.push_back(static_cast<char>(v >> 8));
    };
    u32(0xa1b2c3d4u);
    u16(2);
    u16(4);
    u32(0);
    u32(0);
    u32(65535);
    u32(105);

    FrameRecord f;
    f.psdu_len = 104; // 100 captured + the stripped FCS
    f.type = 2;
    f.subtype = 0;
    f.kind = FrameKind::Data;
    f.to_ds = true;
    f.duration = DurationId(44);
    f.addr1 = ts::ap1();
    f.addr2 = ts::sta_a();
    auto mpdu = ts::encode_mpdu(f);
    mpdu.resize(100);

    u32(7);      // ts sec
    u32(500000); // ts usec
    u32(static_cast<std::uint32_t>(mpdu.size()));
    u32(static_cast<std::uint32_t>(mpdu.size()));
    b.append(reinterpret_cast<const char*>(mpdu.data()), mpdu.size());

    ts::TempDir tmp;
    const auto path = tmp.file("bare.pcap");
    write_text(path, b);

    IngestStats stats;
    const auto frames = read_pcap(path, 0, stats);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].timestamp_us == 7'500'000);
    CHECK(frames[0].psdu_len == 104); // FCS added back
    CHECK(frames[0].rate_mbps == 6.0);
    CHECK(stats.missing_rate == 1);
    CHECK(frames[0].addr1 == ts::ap1());
    CHECK(frames[0].addr2.has_value());
    CHECK(*frames[0].addr2 == ts::sta_a());
    CHECK(frames[0].duration.raw() == 44);
}

TEST_CASE("format dispatch") {
    ts::TempDir tmp;
    IngestStats stats;
    CHECK_THROWS_AS(read_trace(tmp.file("x"), "csv", 0, stats), ConfigError);
}
