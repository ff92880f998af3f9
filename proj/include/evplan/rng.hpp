#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace evplan {

/// Stream tags so each stochastic stage draws from its own key space.
enum class RngPurpose : std::uint64_t {
    circuity = 1,
    fleet = 2,
    day = 3,
    sweep = 4,
    curve = 5,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: output k is a hash of (key, k). Streams are
/// derived by mixing extra words into the key, so any (seed, purpose,
/// entity, day) tuple gets an independent, reproducible sequence no matter
/// which thread consumes it or in what order.
class KeyedRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit KeyedRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

    constexpr KeyedRng(std::uint64_t seed, RngPurpose purpose)
        : KeyedRng(KeyedRng(seed).derive(static_cast<std::uint64_t>(purpose))) {}

    /// Child stream keyed by an additional word.
    constexpr KeyedRng derive(std::uint64_t word) const {
        KeyedRng child(0);
        child.key_ = splitmix64(key_ ^ splitmix64(word + 0x632be59bd9b4e019ULL));
        return child;
    }

    constexpr KeyedRng derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return splitmix64(key_ + 0xd1342543de82ef95ULL * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Standard normal draw (Marsaglia polar). Implemented here rather than via
/// std::normal_distribution so sequences match across standard libraries.
double standard_normal(KeyedRng& rng);

inline double normal(KeyedRng& rng, double mean, double sd) { return mean + sd * standard_normal(rng); }

}  // namespace evplan
