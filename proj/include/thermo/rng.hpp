#pragma once

#include <cstdint>

namespace thermo {

// Counter-based generator: output k of stream (seed, stream) is the SplitMix64 finalizer
// applied to a keyed counter, so any draw can be recomputed without replaying the sequence.
class CounterRng {
public:
    static constexpr const char* kAlgorithm = "splitmix64-ctr-v1";

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ull))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t at(std::uint64_t counter) const { return mix(key_ + counter * 0x9e3779b97f4a7c15ull); }
    std::uint64_t next() { return at(counter_++); }
    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace thermo
