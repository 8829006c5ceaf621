#ifndef MICRONAP_ERROR_MODELS_HPP
#define MICRONAP_ERROR_MODELS_HPP

#include <cstdint>
#include <vector>

#include "micronap/frame.hpp"

namespace micronap {

// Bit error parameters for the 15-bit NAV portion of the duration field.
// Errors arrive in bursts: Poisson-many bursts of Poisson-many bit errors
// (Neyman type A contagious distribution). lambda_b is the mean burst size;
// the burst rate derives from the target mean bit error rate.
struct ErrorModelParams {
    double ber = 0;
    double lambda_b = 1.0;

    // Burst rate lambda_B over an n-bit field such that the expected number
    // of bit errors is n * ber.
    double lambda_burst(int n_bits) const { return static_cast<double>(n_bits) * ber / lambda_b; }
};

inline constexpr int kNavBits = 15;

// Independent-bit model: probability that any of the 15 NAV bits flips.
double ploss_single_bit(double ber);

// Fraction of the 15 NAV bits whose flip enlarges the value (a 0 bit):
// (15 - popcount) / 15. Only NAV-class values (< 32768) have a reading.
double p_eg_fraction(std::uint16_t nav_value);

// P[k bit errors in an n-bit field] under Neyman type A, by the recursion
//   p(0) = exp(-lambda_B (1 - e^{-lambda_b}))
//   p(k) = (lambda_B lambda_b e^{-lambda_b} / k) sum_{j=0}^{k-1} lambda_b^j / j! p(k-1-j)
double neyman_pk(int n_bits, int k, const ErrorModelParams& params);

// Frame loss under the burst model: any 1..15 bit errors in the NAV field.
double ploss_neyman(const ErrorModelParams& params);

// Duration histogram row: how often each NAV value occurs and how likely a
// single bit flip is to enlarge it.
struct DurationHistogramRow {
    std::uint16_t value = 0;
    std::uint64_t count = 0;
    double percent = 0;      // share of NAV-classified frames
    double eg_fraction = 0;  // p_eg_fraction(value)
};

// Rows sorted by descending percentage (value ascending on ties), over the
// NAV-classified frames of the input. Other duration classes are ignored.
std::vector<DurationHistogramRow> duration_histogram(const std::vector<FrameRecord>& frames);

} // namespace micronap

#endif
