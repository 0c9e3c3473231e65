#ifndef FV_RNG_HPP
#define FV_RNG_HPP

#include <cstdint>

namespace fv {

// Counter-based generator built on the SplitMix64 finalizer. A stream is
// keyed by (seed, run, stream id); the i-th draw of a stream depends only on
// the key and i, so parallel runs never share state and any draw can be
// reproduced in isolation.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t run, std::uint64_t stream)
        : key_(mix(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ run) ^ stream)) {}

    std::uint64_t next_u64() {
        ++counter_;
        return mix(key_ + 0x9E3779B97F4A7C15ull * counter_);
    }

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

    static std::uint64_t stream_id(std::uint64_t tag, std::uint64_t period) {
        return (tag << 16) | period;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace fv

#endif
