#include "micronap/hw_profile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "micronap/common.hpp"

namespace micronap {

HardwareProfile HardwareProfile::ar9280() {
    HardwareProfile p;
    p.name = "ar9280";
    p.t_off_us = 50;
    p.t_on_us = 50;
    p.t_ready_us = 200;
    p.p_tx_w = 3.10;
    p.p_rx_w = 1.373;
    p.p_ov_w = 1.371;
    p.p_idle_w = 1.292;
    p.p_sleep_w = 0.424;
    return p;
}

void HardwareProfile::validate() const {
    if (t_off_us < 0 || t_on_us < 0 || t_ready_us < 0)
        throw ConfigError("profile times must be non-negative");
    if (!(p_sleep_w < p_idle_w) || !(p_idle_w <= p_rx_w))
        throw ConfigError("profile powers must satisfy p_sleep < p_idle <= p_rx");
    if (p_tx_w < 0 || p_ov_w < 0) throw ConfigError("profile powers must be non-negative");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::int64_t parse_time_us(const std::string& key, const std::string& val) {
    double v = 0;
    try {
        std::size_t pos = 0;
        v = std::stod(val, &pos);
        if (pos != val.size()) throw ConfigError("");
    } catch (...) {
        throw ConfigError("profile key " + key + ": not a number: '" + val + "'");
    }
    if (v < 0) throw ConfigError("profile key " + key + ": negative time");
    const double r = std::round(v);
    if (r != v) throw ConfigError("profile key " + key + ": times are integral microseconds");
    return static_cast<std::int64_t>(r);
}

double parse_watts(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(val, &pos);
        if (pos != val.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("profile key " + key + ": not a number: '" + val + "'");
    }
}

} // namespace

HardwareProfile HardwareProfile::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile: " + path);

    HardwareProfile p;
    std::unordered_set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key " + key);

        if (key == "name") p.name = val;
        else if (key == "t_off_us") p.t_off_us = parse_time_us(key, val);
        else if (key == "t_on_us") p.t_on_us = parse_time_us(key, val);
        else if (key == "t_ready_us") p.t_ready_us = parse_time_us(key, val);
        else if (key == "p_tx_w") p.p_tx_w = parse_watts(key, val);
        else if (key == "p_rx_w") p.p_rx_w = parse_watts(key, val);
        else if (key == "p_ov_w") p.p_ov_w = parse_watts(key, val);
        else if (key == "p_idle_w") p.p_idle_w = parse_watts(key, val);
        else if (key == "p_sleep_w") p.p_sleep_w = parse_watts(key, val);
        else
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }

    for (const char* req : {"t_off_us", "t_on_us", "t_ready_us", "p_tx_w", "p_rx_w", "p_ov_w",
                            "p_idle_w", "p_sleep_w"})
        if (!seen.count(req)) throw ConfigError(path + ": missing key " + req);

    p.validate();
    return p;
}

double energy_saved_ideal_uj(const HardwareProfile& p, std::int64_t dt_sleep_us) {
    if (dt_sleep_us < 0) throw DomainError("negative sleep duration");
    return (p.p_idle_w - p.p_sleep_w) * static_cast<double>(dt_sleep_us);
}

double energy_waste_uj(const HardwareProfile& p) {
    // Rectangular approximation: the whole waste window burns the full
    // idle-to-sleep power gap.
    return (p.p_idle_w - p.p_sleep_w) * static_cast<double>(p.t_waste_us());
}

double energy_saved_real_uj(const HardwareProfile& p, std::int64_t dt_sleep_us) {
    if (dt_sleep_us < p.t_sleep_min_us())
        throw SleepTooShortError("sleep of " + std::to_string(dt_sleep_us) +
                                 " us is under the hardware minimum " +
                                 std::to_string(p.t_sleep_min_us()) + " us");
    return energy_saved_ideal_uj(p, dt_sleep_us) - energy_waste_uj(p);
}

} // namespace micronap
