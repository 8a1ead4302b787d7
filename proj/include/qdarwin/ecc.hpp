// Classical repetition code over a binary symmetric channel: encode a bit
// as n copies, flip each transmitted bit independently with probability p,
// decode by majority vote, and compare the observed decoding failure rate
// against the binomial tail.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qdarwin/rng.hpp"

namespace qdarwin::ecc {

struct Codeword {
    std::vector<std::uint8_t> bits;

    explicit Codeword(std::vector<std::uint8_t> b) : bits(std::move(b)) {
        if (bits.empty()) throw std::invalid_argument("codeword must have length >= 1");
        for (std::uint8_t bit : bits) {
            if (bit > 1) throw std::invalid_argument("codeword bits must be 0 or 1");
        }
    }

    int length() const { return static_cast<int>(bits.size()); }

    friend bool operator==(const Codeword& a, const Codeword& b) { return a.bits == b.bits; }
};

// Binary symmetric channel: independent flip probability p, seeded.
struct ChannelSpec {
    double p = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p >= 0.0 && p <= 0.5)) {
            throw std::invalid_argument("flip probability must lie in [0, 1/2]");
        }
    }
};

inline Codeword encode(int bit, int n) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("message bit must be 0 or 1");
    if (n < 1) throw std::invalid_argument("repetition length must be >= 1");
    return Codeword(std::vector<std::uint8_t>(static_cast<std::size_t>(n),
                                              static_cast<std::uint8_t>(bit)));
}

inline int hamming_distance(const Codeword& a, const Codeword& b) {
    if (a.length() != b.length()) {
        throw std::invalid_argument("hamming distance needs equal lengths");
    }
    int d = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        d += a.bits[i] != b.bits[i];
    }
    return d;
}

// Each bit flips independently; the flip decision is a pure function of
// (seed, trial_index, bit position), so repeated runs agree bit for bit.
inline Codeword transmit(const Codeword& c, const ChannelSpec& ch, std::uint64_t trial_index) {
    ch.validate();
    std::vector<std::uint8_t> out = c.bits;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = rng::keyed_unit(ch.seed, rng::Stream::channel_noise, trial_index,
                                         static_cast<std::uint64_t>(i));
        if (u < ch.p) out[i] ^= 1u;
    }
    return Codeword(std::move(out));
}

// Majority bit; ties (even n) decode to 0. Equivalent to nearest-codeword
// decoding in Hamming distance.
inline int majority_decode(const Codeword& c) {
    int ones = 0;
    for (std::uint8_t bit : c.bits) ones += bit;
    return 2 * ones > c.length() ? 1 : 0;
}

// P(decode error) = sum_{k > n/2} C(n,k) p^k (1-p)^(n-k). Exact binomial
// products for small n; log-space for lengths where C(n,k) overflows.
inline double analytic_error_rate(int n, double p) {
    if (n < 1) throw std::invalid_argument("repetition length must be >= 1");
    if (!(p >= 0.0 && p <= 0.5)) {
        throw std::invalid_argument("flip probability must lie in [0, 1/2]");
    }
    double total = 0.0;
    if (n <= 60) {
        for (int k = n / 2 + 1; k <= n; ++k) {
            double c = 1.0;
            for (int i = 1; i <= k; ++i) {
                c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
            }
            total += c * std::pow(p, k) * std::pow(1.0 - p, n - k);
        }
        return total;
    }
    if (p == 0.0) return 0.0;
    for (int k = n / 2 + 1; k <= n; ++k) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) + k * std::log(p) +
                                (n - k) * std::log1p(-p);
        total += std::exp(log_term);
    }
    return total;
}

struct ErrorRateResult {
    int n = 0;
    double p = 0.0;
    std::int64_t trials = 0;
    double empirical = 0.0;
    double analytic = 0.0;
};

// Decoding failure rate over seeded random message bits. n must be odd so
// the majority is never ambiguous.
inline ErrorRateResult error_rate_experiment(int n, double p, std::int64_t trials,
                                             std::uint64_t seed) {
    if (n < 1 || n % 2 == 0) {
        throw std::invalid_argument("ambiguous majority; use odd n");
    }
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const ChannelSpec channel{p, seed};
    channel.validate();

    std::int64_t failures = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const int bit = static_cast<int>(
            rng::keyed(seed, rng::Stream::message_bits, static_cast<std::uint64_t>(t), 0) & 1u);
        const Codeword received = transmit(encode(bit, n), channel, static_cast<std::uint64_t>(t));
        if (majority_decode(received) != bit) ++failures;
    }
    return ErrorRateResult{n, p, trials, static_cast<double>(failures) / static_cast<double>(trials),
                           analytic_error_rate(n, p)};
}

}  // namespace qdarwin::ecc
