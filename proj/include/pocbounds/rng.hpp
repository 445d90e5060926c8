#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace poc {

// SplitMix64 finalizer. Used to turn (seed, purpose, index) triples into
// decorrelated substream seeds so that every sampled object is reproducible
// from the master seed alone, independent of evaluation order elsewhere.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Substream purposes. Keep values stable: they are part of the determinism
// contract (same seed => same tables/models across runs and platforms).
namespace substream {
inline constexpr std::uint64_t kCpt = 1;       // one stream per simulated CPT set
inline constexpr std::uint64_t kScmLaw = 2;    // one stream per random SCM
inline constexpr std::uint64_t kPlotPick = 3;  // plot subset selection
inline constexpr std::uint64_t kProbe = 4;     // tightness-probe instances
} // namespace substream

// Thin wrapper over std::mt19937_64 with portable double helpers. mt19937_64
// output is fully specified by the standard, and the uniform double below uses
// only shifts and one multiply, so streams are bit-identical across platforms
// (std::uniform_real_distribution would not be).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static Rng substream(std::uint64_t master, std::uint64_t purpose, std::uint64_t index) {
        std::uint64_t s = mix64(master);
        s = mix64(s ^ purpose);
        s = mix64(s ^ index);
        return Rng(s);
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Exponential(1). Finite: uniform01() < 1 always.
    double exp1() {
        return -std::log1p(-uniform01());
    }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t last = max - (max % n + 1) % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v > last);
        return v % n;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace poc
