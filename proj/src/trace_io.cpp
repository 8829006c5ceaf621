#include "micronap/trace_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "micronap/common.hpp"
#include "micronap/phy.hpp"

namespace micronap {

IngestStats& IngestStats::operator+=(const IngestStats& o) {
    frames += o.frames;
    skipped_truncated += o.skipped_truncated;
    skipped_malformed += o.skipped_malformed;
    missing_rate += o.missing_rate;
    unknown_rate += o.unknown_rate;
    return *this;
}

namespace {

// Ingest-side rate policy: anything outside the 11a table is replaced by the
// lowest rate and counted, so replay arithmetic always has a valid rate.
void normalize_rate(FrameRecord& f, bool had_rate, IngestStats& stats) {
    static const PhyParams phy = PhyParams::ofdm_11a();
    if (!had_rate) {
        ++stats.missing_rate;
        f.rate_mbps = 6.0;
        return;
    }
    if (!phy.bits_per_symbol(f.rate_mbps)) {
        ++stats.unknown_rate;
        f.rate_mbps = 6.0;
    }
}

void check_monotonic(const std::vector<FrameRecord>& frames, const std::string& path) {
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].timestamp_us < frames[i - 1].timestamp_us)
            throw InputError(path + ": non-monotonic timestamps at record " + std::to_string(i));
}

} // namespace

std::vector<FrameRecord> read_ndjson(const std::string& path, std::uint32_t source_id,
                                     IngestStats& stats) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace: " + path);

    std::vector<FrameRecord> frames;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++stats.skipped_malformed;
            continue;
        }

        FrameRecord f;
        f.source_id = source_id;
        bool had_rate = false;
        try {
            f.timestamp_us = j.at("timestamp_us").get<std::int64_t>();
            f.psdu_len = j.at("len").get<std::uint32_t>();
            f.type = j.at("type").get<std::uint8_t>();
            f.subtype = j.at("subtype").get<std::uint8_t>();
            f.duration = DurationId(j.at("duration_raw").get<std::uint16_t>());
            const auto a1 = MacAddress::parse(j.at("addr1").get<std::string>());
            if (!a1) throw std::runtime_error("addr1");
            f.addr1 = *a1;
            if (j.contains("addr2") && !j["addr2"].is_null()) {
                const auto a2 = MacAddress::parse(j["addr2"].get<std::string>());
                if (!a2) throw std::runtime_error("addr2");
                f.addr2 = *a2;
            }
            const auto flags = j.value("flags", 0u);
            f.to_ds = (flags & 1u) != 0;
            f.from_ds = (flags & 2u) != 0;
            f.more_frag = (flags & 4u) != 0;
            f.retry = (flags & 8u) != 0;
            f.fcs_ok = j.value("fcs_ok", true);
            if (j.contains("rate") && j["rate"].is_number()) {
                f.rate_mbps = j["rate"].get<double>();
                had_rate = true;
            }
        } catch (...) {
            ++stats.skipped_malformed;
            continue;
        }

        f.kind = classify_kind(f.type, f.subtype);
        if (!kind_has_addr2(f.kind)) f.addr2.reset();
        normalize_rate(f, had_rate, stats);
        frames.push_back(f);
        ++stats.frames;
    }
    check_monotonic(frames, path);
    return frames;
}

std::string frame_to_json_line(const FrameRecord& f) {
    nlohmann::ordered_json j;
    j["timestamp_us"] = f.timestamp_us;
    j["rate"] = f.rate_mbps;
    j["len"] = f.psdu_len;
    j["type"] = f.type;
    j["subtype"] = f.subtype;
    unsigned flags = 0;
    if (f.to_ds) flags |= 1u;
    if (f.from_ds) flags |= 2u;
    if (f.more_frag) flags |= 4u;
    if (f.retry) flags |= 8u;
    j["flags"] = flags;
    j["duration_raw"] = f.duration.raw();
    j["addr1"] = f.addr1.to_string();
    if (f.addr2) j["addr2"] = f.addr2->to_string();
    else j["addr2"] = nullptr;
    j["fcs_ok"] = f.fcs_ok;
    return j.dump();
}

void write_ndjson(const std::string& path, const std::vector<FrameRecord>& frames) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write: " + path);
    for (const auto& f : frames) out << frame_to_json_line(f) << '\n';
    if (!out) throw InputError("write failed: " + path);
}

namespace {

// Classic pcap framing. The magic doubles as a byte-order and timestamp
// resolution marker.
constexpr std::uint32_t kMagicUs = 0xa1b2c3d4u;
constexpr std::uint32_t kMagicUsSwapped = 0xd4c3b2a1u;
constexpr std::uint32_t kMagicNs = 0xa1b23c4du;
constexpr std::uint32_t kMagicNsSwapped = 0x4d3cb2a1u;

constexpr std::uint32_t kLinkRadiotap = 127;
constexpr std::uint32_t kLinkIeee80211 = 105;

std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }

struct ByteReader {
    const std::uint8_t* p = nullptr;
    std::size_t n = 0;
    bool swap = false;

    bool need(std::size_t k) const { return n >= k; }
    std::uint8_t u8(std::size_t off) const { return p[off]; }
    std::uint16_t u16le(std::size_t off) const {
        return static_cast<std::uint16_t>(p[off] | (p[off + 1] << 8));
    }
    std::uint32_t u32(std::size_t off) const {
        std::uint32_t v;
        std::memcpy(&v, p + off, 4);
        return swap ? bswap32(v) : v;
    }
    std::uint64_t u64le(std::size_t off) const {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[off + static_cast<std::size_t>(i)];
        return v;
    }
};

std::size_t align_up(std::size_t off, std::size_t a) { return (off + a - 1) / a * a; }

// Radiotap bits we consume. Fields are laid out in bit order with natural
// alignment from the start of the radiotap header, so only earlier bits
// affect the offsets of the ones we want (TSFT=0, Flags=1, Rate=2).
struct RadiotapInfo {
    bool ok = false;
    std::size_t header_len = 0;
    bool has_tsft = false;
    std::uint64_t tsft_us = 0;
    bool has_flags = false;
    std::uint8_t flags = 0;
    bool has_rate = false;
    double rate_mbps = 0;
};

RadiotapInfo parse_radiotap(const std::uint8_t* p, std::size_t n) {
    RadiotapInfo info;
    if (n < 8) return info;
    if (p[0] != 0) return info; // version
    const std::size_t rlen = static_cast<std::size_t>(p[2] | (p[3] << 8));
    if (rlen < 8 || rlen > n) return info;

    std::uint32_t present0;
    std::memcpy(&present0, p + 4, 4);
    std::size_t off = 8;
    std::uint32_t word = present0;
    while (word & 0x80000000u) { // chained present words
        if (off + 4 > rlen) return info;
        std::memcpy(&word, p + off, 4);
        off += 4;
    }

    if (present0 & (1u << 0)) { // TSFT, u64 us
        off = align_up(off, 8);
        if (off + 8 > rlen) return info;
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[off + static_cast<std::size_t>(i)];
        info.has_tsft = true;
        info.tsft_us = v;
        off += 8;
    }
    if (present0 & (1u << 1)) { // Flags, u8
        if (off + 1 > rlen) return info;
        info.has_flags = true;
        info.flags = p[off];
        off += 1;
    }
    if (present0 & (1u << 2)) { // Rate, u8, units of 0.5 Mbps
        if (off + 1 > rlen) return info;
        info.has_rate = true;
        info.rate_mbps = p[off] / 2.0;
        off += 1;
    }

    info.ok = true;
    info.header_len = rlen;
    return info;
}

constexpr std::uint8_t kRadiotapFlagFcsAtEnd = 0x10;
constexpr std::uint8_t kRadiotapFlagBadFcs = 0x40;

} // namespace

std::vector<FrameRecord> read_pcap(const std::string& path, std::uint32_t source_id,
                                   IngestStats& stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open trace: " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(raw.data());
    const std::size_t size = raw.size();

    if (size < 24) throw InputError(path + ": not a pcap file");
    std::uint32_t magic;
    std::memcpy(&magic, bytes, 4);

    bool swap = false;
    bool nanos = false;
    if (magic == kMagicUs) swap = false;
    else if (magic == kMagicUsSwapped) swap = true;
    else if (magic == kMagicNs) nanos = true;
    else if (magic == kMagicNsSwapped) { swap = true; nanos = true; }
    else throw InputError(path + ": unknown pcap magic");

    ByteReader hdr{bytes, size, swap};
    const std::uint32_t linktype = hdr.u32(20);
    if (linktype != kLinkRadiotap && linktype != kLinkIeee80211)
        throw InputError(path + ": unsupported linktype " + std::to_string(linktype));

    std::vector<FrameRecord> frames;
    std::size_t off = 24;
    while (off + 16 <= size) {
        ByteReader rec{bytes + off, size - off, swap};
        const std::uint64_t ts_sec = rec.u32(0);
        const std::uint64_t ts_frac = rec.u32(4);
        const std::size_t incl = rec.u32(8);
        off += 16;
        if (off + incl > size) throw InputError(path + ": truncated pcap record");

        const std::uint8_t* pkt = bytes + off;
        off += incl;

        std::int64_t ts_us =
            static_cast<std::int64_t>(ts_sec) * 1'000'000 +
            static_cast<std::int64_t>(nanos ? ts_frac / 1000 : ts_frac);

        const std::uint8_t* mpdu = pkt;
        std::size_t mpdu_len = incl;
        bool fcs_at_end = false;
        bool fcs_bad = false;
        bool had_rate = false;
        double rate = 6.0;

        if (linktype == kLinkRadiotap) {
            const auto rt = parse_radiotap(pkt, incl);
            if (!rt.ok) {
                ++stats.skipped_malformed;
                continue;
            }
            mpdu = pkt + rt.header_len;
            mpdu_len = incl - rt.header_len;
            if (rt.has_tsft) ts_us = static_cast<std::int64_t>(rt.tsft_us);
            if (rt.has_flags) {
                fcs_at_end = (rt.flags & kRadiotapFlagFcsAtEnd) != 0;
                fcs_bad = (rt.flags & kRadiotapFlagBadFcs) != 0;
            }
            if (rt.has_rate) {
                rate = rt.rate_mbps;
                had_rate = true;
            }
        }

        auto parsed = parse_header({mpdu, mpdu_len});
        if (parsed.status != HeaderParseStatus::Ok) {
            ++stats.skipped_truncated;
            continue;
        }

        FrameRecord f = parsed.frame;
        f.source_id = source_id;
        f.timestamp_us = ts_us;
        f.rate_mbps = rate;
        // On-air PSDU always ends in the 4-byte FCS; add it back when the
        // capture stripped it.
        f.psdu_len = static_cast<std::uint32_t>(mpdu_len + (fcs_at_end ? 0 : 4));
        f.fcs_ok = !fcs_bad;
        normalize_rate(f, had_rate, stats);
        frames.push_back(f);
        ++stats.frames;
    }

    check_monotonic(frames, path);
    return frames;
}

std::vector<FrameRecord> read_trace(const std::string& path, const std::string& format,
                                    std::uint32_t source_id, IngestStats& stats) {
    if (format == "pcap") return read_pcap(path, source_id, stats);
    if (format == "ndjson") return read_ndjson(path, source_id, stats);
    throw ConfigError("unknown trace format: " + format);
}

} // namespace micronap
