#ifndef MICRONAP_TRACE_IO_HPP
#define MICRONAP_TRACE_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "micronap/frame.hpp"

namespace micronap {

// Per-file ingestion counters, reported in the run summary.
struct IngestStats {
    std::uint64_t frames = 0;
    std::uint64_t skipped_truncated = 0; // MPDU under 10 bytes
    std::uint64_t skipped_malformed = 0; // unparseable records/lines
    std::uint64_t missing_rate = 0;      // no rate field, defaulted to 6 Mbps
    std::uint64_t unknown_rate = 0;      // non-11a rate, defaulted to 6 Mbps

    IngestStats& operator+=(const IngestStats& o);
};

// Normalized trace format: one JSON object per line, fields
//   timestamp_us (int), rate (Mbps), len (PSDU bytes incl. FCS),
//   type (0..3), subtype (0..15), flags (bit0 to_ds, bit1 from_ds,
//   bit2 more_frag, bit3 retry), duration_raw (0..65535),
//   addr1 ("aa:bb:cc:dd:ee:ff"), addr2 (string or null), fcs_ok (bool).
// Timestamps must be non-decreasing within a file.
std::vector<FrameRecord> read_ndjson(const std::string& path, std::uint32_t source_id,
                                     IngestStats& stats);
void write_ndjson(const std::string& path, const std::vector<FrameRecord>& frames);
std::string frame_to_json_line(const FrameRecord& f);

// Classic pcap (both byte orders, micro- and nanosecond variants) with
// radiotap (linktype 127) or bare 802.11 (linktype 105) frames. From
// radiotap only TSFT, Flags and Rate are consumed; frames lacking a rate
// default to 6 Mbps and are counted.
std::vector<FrameRecord> read_pcap(const std::string& path, std::uint32_t source_id,
                                   IngestStats& stats);

// Dispatch on declared format ("pcap" or "ndjson").
std::vector<FrameRecord> read_trace(const std::string& path, const std::string& format,
                                    std::uint32_t source_id, IngestStats& stats);

} // namespace micronap

#endif
