#pragma once

#include <cmath>
#include <cstdint>

namespace waterfall {

/// Small counter-derived random source (SplitMix64 core with Box-Muller
/// gaussians). Streams for independent Monte-Carlo trials are derived as a
/// pure function of (master seed, grid point, frame index), which makes
/// aggregate results independent of how trials are scheduled across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Stream for trial (a, b) under a master seed. Mixing each component
    /// through the SplitMix64 finalizer keeps nearby indices decorrelated.
    static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t s = mix(master + kGamma);
        s = mix(s ^ mix(a + 2 * kGamma));
        s = mix(s ^ mix(b + 3 * kGamma));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform on (0, 1]; never returns 0, so log(uniform01()) is safe.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bit() { return (next_u64() >> 63) != 0; }

    /// Standard normal via Box-Muller; second deviate cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * kPi * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace waterfall
