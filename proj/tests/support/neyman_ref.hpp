#ifndef MICRONAP_TESTS_NEYMAN_REF_HPP
#define MICRONAP_TESTS_NEYMAN_REF_HPP

#include <cstdint>

namespace micronap::testsupport {

// Reference for the burst error model, computed from the definition instead
// of the recursion: a Poisson number of bursts B with mean n*ber/lambda_b,
// each burst contributing Poisson(lambda_b) hit bits,
//   P(K = k) = (lambda_b^k / k!) e^{-lambda_B}
//              * sum_i (i^k / i!) lambda_B^i e^{-i lambda_b}.
double neyman_pk_direct(int n_bits, double ber, double lambda_b, int k);

// P(1 <= K <= max_k) by direct summation.
double neyman_loss_direct(int n_bits, double ber, double lambda_b, int max_k);

// Monte Carlo estimate of the same probability with its standard error.
struct McEstimate {
    double p = 0;
    double stderr_p = 0;
    std::uint64_t trials = 0;
};
McEstimate neyman_loss_mc(int n_bits, double ber, double lambda_b, int max_k,
                          std::uint64_t trials, std::uint64_t seed);

} // namespace micronap::testsupport

#endif
