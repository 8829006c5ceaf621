#ifndef MICRONAP_HW_PROFILE_HPP
#define MICRONAP_HW_PROFILE_HPP

#include <cstdint>
#include <string>

namespace micronap {

// Radio sleep/wake timing and per-state power draw. Times are integral
// microseconds (the simulation grid), powers in watts.
//
// Sleep transitions cost time at both ends: t_off to power down, t_on to
// power up, t_ready until the receiver is usable again. A sleep shorter than
// the sum cannot complete, and t_off + t_ready is burned at idle power no
// matter how long the nap lasts.
struct HardwareProfile {
    std::string name = "custom";
    std::int64_t t_off_us = 0;
    std::int64_t t_on_us = 0;
    std::int64_t t_ready_us = 0;
    double p_tx_w = 0;
    double p_rx_w = 0;
    double p_ov_w = 0;
    double p_idle_w = 0;
    double p_sleep_w = 0;

    std::int64_t t_sleep_min_us() const { return t_off_us + t_on_us + t_ready_us; }
    std::int64_t t_waste_us() const { return t_off_us + t_ready_us; }

    // AR9280 measurements: 50/50/200 us transitions, 3.10/1.373/1.371/1.292/0.424 W.
    static HardwareProfile ar9280();

    // Loads a UTF-8 key=value file ('#' comments and blank lines allowed).
    // Unknown keys are rejected, as are fractional-microsecond times,
    // negative times, and power orderings that make no physical sense
    // (requires p_sleep < p_idle <= p_rx). Throws ConfigError.
    static HardwareProfile load_file(const std::string& path);

    void validate() const; // the loader's checks, usable on hand-built profiles
};

// Energy in microjoules (W * us). Ideal saving assumes the state switch is
// free; the real saving subtracts the transition waste, modeled as the full
// idle-sleep gap over t_waste (rectangular approximation of the ramps).
double energy_saved_ideal_uj(const HardwareProfile& p, std::int64_t dt_sleep_us);
double energy_waste_uj(const HardwareProfile& p);

// energy_saved_ideal - energy_waste. Throws SleepTooShortError when the nap
// is shorter than t_sleep_min and the transitions cannot complete at all.
double energy_saved_real_uj(const HardwareProfile& p, std::int64_t dt_sleep_us);

} // namespace micronap

#endif
