// Counter-based deterministic random streams.
//
// Every random decision in the library is a pure function of
// (seed, stream tag, counters), so results never depend on evaluation
// order or thread scheduling. The mixer is the SplitMix64 finalizer.

#pragma once

#include <cstdint>

namespace qdarwin::rng {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Domain separation tags: independent modules draw from disjoint streams
// even when they share a user seed.
enum class Stream : std::uint64_t {
    scattering_pairs = 1,
    fragment_draw = 2,
    channel_noise = 3,
    message_bits = 4,
};

constexpr std::uint64_t keyed(std::uint64_t seed, Stream stream,
                              std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed + golden_gamma);
    h = mix64(h ^ (static_cast<std::uint64_t>(stream) + golden_gamma));
    h = mix64(h ^ (a + golden_gamma));
    h = mix64(h ^ (b + golden_gamma));
    return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double keyed_unit(std::uint64_t seed, Stream stream,
                            std::uint64_t a, std::uint64_t b) {
    return to_unit(keyed(seed, stream, a, b));
}

// Sequential stream for shuffles; the key pins the whole sequence.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next() {
        state_ += golden_gamma;
        return mix64(state_);
    }

    // Uniform integer in [0, bound) via the multiply-shift reduction.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    double next_unit() { return to_unit(next()); }

private:
    std::uint64_t state_;
};

}  // namespace qdarwin::rng
