#ifndef MICRONAP_COMMON_HPP
#define MICRONAP_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace micronap {

// Error taxonomy. Config/input errors map to CLI exit codes 1 and 2,
// internal invariant violations to 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Domain violations of the analytical operations (bad rate, sleep shorter
// than the hardware minimum, out-of-range duration values).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnknownRateError : DomainError {
    explicit UnknownRateError(double rate_mbps)
        : DomainError("rate " + std::to_string(rate_mbps) + " Mbps is not an OFDM 802.11a rate") {}
};

struct SleepTooShortError : DomainError {
    using DomainError::DomainError;
};

// Log levels, selected via the MICRONAP_LOG environment variable
// (unset or "" = warnings only, "info", "debug").
enum class LogLevel { Warn = 0, Info = 1, Debug = 2 };

LogLevel log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

} // namespace micronap

#endif
