#pragma once

#include <cmath>
#include <cstdint>

namespace fpd {

// Deterministic 64-bit generator (splitmix64). The constants below are part
// of the file-format-level contract: degraded track files are reproducible
// bit-for-bit from (seed, point index) alone, independent of platform.
//
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller on the uniform stream. Two uniforms are
    // consumed per pair; the sine half is cached for the next call.
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Derives an independent stream seed from (base, index). One scramble
    // round of splitmix64 applied to base ^ golden*(index+1).
    static std::uint64_t derive(std::uint64_t base, std::uint64_t index) {
        std::uint64_t z = base ^ (0x9E3779B97F4A7C15ull * (index + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace fpd
