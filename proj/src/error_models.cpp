#include "micronap/error_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "micronap/common.hpp"

namespace micronap {

double ploss_single_bit(double ber) {
    if (ber < 0 || ber > 1) throw DomainError("ber out of [0,1]");
    // 1 - (1-ber)^15, via expm1/log1p so rates around 1e-9 keep their
    // precision instead of cancelling against the leading 1
    return -std::expm1(static_cast<double>(kNavBits) * std::log1p(-ber));
}

double p_eg_fraction(std::uint16_t nav_value) {
    if (nav_value >= 0x8000u) throw DomainError("value is not NAV-classified");
    const int ones = std::popcount(static_cast<unsigned>(nav_value));
    return static_cast<double>(kNavBits - ones) / static_cast<double>(kNavBits);
}

double neyman_pk(int n_bits, int k, const ErrorModelParams& params) {
    if (n_bits < 1) throw DomainError("n_bits must be >= 1");
    if (k < 0) throw DomainError("k must be >= 0");
    if (params.ber < 0 || params.ber > 1) throw DomainError("ber out of [0,1]");
    if (params.lambda_b <= 0) throw DomainError("lambda_b must be positive");

    const double lb = params.lambda_b;
    const double lB = params.lambda_burst(n_bits);
    const double em = std::exp(-lb);

    // p(0), then each p(k) from all smaller orders.
    std::vector<double> p(static_cast<std::size_t>(k) + 1, 0.0);
    p[0] = std::exp(-lB * (1.0 - em));
    // lb^j / j!, built incrementally
    std::vector<double> pow_fact(static_cast<std::size_t>(std::max(k, 1)), 1.0);
    for (std::size_t j = 1; j < pow_fact.size(); ++j)
        pow_fact[j] = pow_fact[j - 1] * lb / static_cast<double>(j);

    for (int kk = 1; kk <= k; ++kk) {
        double sum = 0;
        for (int j = 0; j <= kk - 1; ++j)
            sum += pow_fact[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(kk - 1 - j)];
        p[static_cast<std::size_t>(kk)] = lB * lb * em / static_cast<double>(kk) * sum;
    }
    return p[static_cast<std::size_t>(k)];
}

double ploss_neyman(const ErrorModelParams& params) {
    // Loss = any 1..15 bit errors among the NAV bits. One recursion pass
    // yields all orders.
    if (params.ber == 0) return 0;
    double total = 0;
    for (int k = 1; k <= kNavBits; ++k) total += neyman_pk(kNavBits, k, params);
    return total;
}

std::vector<DurationHistogramRow> duration_histogram(const std::vector<FrameRecord>& frames) {
    std::map<std::uint16_t, std::uint64_t> counts;
    std::uint64_t nav_total = 0;
    for (const auto& f : frames) {
        if (!f.duration.is_nav()) continue;
        ++counts[f.duration.nav_us()];
        ++nav_total;
    }

    std::vector<DurationHistogramRow> rows;
    rows.reserve(counts.size());
    for (const auto& [value, count] : counts) {
        DurationHistogramRow r;
        r.value = value;
        r.count = count;
        r.percent = 100.0 * static_cast<double>(count) / static_cast<double>(nav_total);
        r.eg_fraction = p_eg_fraction(value);
        rows.push_back(r);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.value < b.value;
    });
    return rows;
}

} // namespace micronap
