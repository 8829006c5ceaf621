#include "micronap/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "micronap/common.hpp"

namespace micronap {

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string ledger_csv(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                       double battery_volts) {
    std::ostringstream out;
    out << "mac,variant,tx_us,rx_us,ov_us,sleep_us,waste_us,idle_us,activity_us,energy_mwh,"
           "energy_mah\n";
    constexpr double kUjPerMwh = 3.6e6; // 1 mWh = 3.6 J
    for (const auto& l : ledgers) {
        for (Variant v : {Variant::Baseline, Variant::Unap}) {
            const LedgerSide& s = v == Variant::Baseline ? l.baseline : l.unap;
            const double uj = activity_energy_uj(s, p);
            const double mwh = uj / kUjPerMwh;
            out << l.mac.to_string() << ',' << to_string(v) << ',' << s.tx_us << ',' << s.rx_us
                << ',' << s.ov_us << ',' << s.sleep_us << ',' << s.waste_us << ',' << s.idle_us
                << ',' << s.activity_us() << ',' << fmt_g6(mwh) << ','
                << fmt_g6(mwh / battery_volts) << '\n';
        }
    }
    return out.str();
}

std::vector<ActivityLedger> parse_ledger_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open ledger csv: " + path);

    std::vector<ActivityLedger> out;
    auto find_or_add = [&](MacAddress mac) -> ActivityLedger& {
        for (auto& l : out)
            if (l.mac == mac) return l;
        out.emplace_back();
        out.back().mac = mac;
        return out.back();
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue; // header
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < 9)
            throw InputError(path + ":" + std::to_string(lineno) + ": malformed ledger row");

        const auto mac = MacAddress::parse(fields[0]);
        if (!mac)
            throw InputError(path + ":" + std::to_string(lineno) + ": bad mac " + fields[0]);
        LedgerSide side;
        try {
            side.tx_us = std::stoll(fields[2]);
            side.rx_us = std::stoll(fields[3]);
            side.ov_us = std::stoll(fields[4]);
            side.sleep_us = std::stoll(fields[5]);
            side.waste_us = std::stoll(fields[6]);
            side.idle_us = std::stoll(fields[7]);
        } catch (const std::exception&) {
            throw InputError(path + ":" + std::to_string(lineno) + ": non-integer time column");
        }

        auto& l = find_or_add(*mac);
        if (fields[1] == "baseline") l.baseline = side;
        else if (fields[1] == "unap") l.unap = side;
        else
            throw InputError(path + ":" + std::to_string(lineno) + ": unknown variant " +
                             fields[1]);
    }
    return out;
}

namespace {

// Round through the printed form so the JSON numbers match every other
// surface of the tool digit for digit.
double g6(double v) { return std::stod(fmt_g6(v)); }

} // namespace

std::string summary_json(const std::vector<ActivityLedger>& ledgers, const HardwareProfile& p,
                         const IngestStats& stats, std::size_t files, std::size_t ap_count,
                         std::size_t unassociated_count, double battery_volts) {
    const EnergyReport rep = energy_report(ledgers, p, battery_volts);

    std::int64_t frames_missed = 0;
    for (const auto& l : ledgers) frames_missed += l.frames_missed;

    nlohmann::ordered_json j;
    j["inputs"] = {{"files", files},
                   {"frames", stats.frames},
                   {"skipped_truncated", stats.skipped_truncated},
                   {"skipped_malformed", stats.skipped_malformed},
                   {"missing_rate", stats.missing_rate},
                   {"unknown_rate", stats.unknown_rate}};
    j["population"] = {{"stations", ledgers.size()},
                       {"access_points", ap_count},
                       {"unassociated", unassociated_count}};
    j["profile"] = p.name;
    j["battery_volts"] = g6(battery_volts);
    j["savings"] = {{"total_uj", g6(rep.total_saved_uj)},
                    {"total_mah", g6(rep.total_saved_mah)},
                    {"pct_of_overhearing_energy", g6(rep.saving_pct_of_overhearing)},
                    {"pct_of_activity_energy", g6(rep.saving_pct_of_activity)},
                    {"overhearing_time_reduction_pct", g6(rep.ov_time_reduction_pct)}};
    j["overhearing_fraction"] = {{"median_baseline", g6(rep.median_ov_fraction_baseline)},
                                 {"median_unap", g6(rep.median_ov_fraction_unap)}};
    j["frames_missed"] = frames_missed;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << content;
    if (!out) throw InputError("write failed: " + path);
}

} // namespace micronap
