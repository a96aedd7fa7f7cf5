#pragma once

// Counter-based deterministic RNG. Every simulated record derives its own
// stream from (seed, stream_id), so parallel and serial runs produce
// bit-identical output regardless of scheduling. SplitMix64 core.

#include <cmath>
#include <cstdint>

namespace rfq {

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        state_ = mix(seed ^ 0x9E3779B97F4A7C15ULL) ^ mix(stream_id * 0xBF58476D1CE4E5B9ULL + 1);
        state_ = mix(state_);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on the open interval (0,1).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    int uniform_int(int lo, int hi) { // inclusive range
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(next_u64() % span);
    }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    // Marsaglia-Tsang; shape < 1 handled via the boost trick.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    int binomial(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
        return k;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Per-module seed expansion: one 64-bit root seed, salted per purpose.
inline std::uint64_t salt_seed(std::uint64_t seed, std::uint64_t salt) {
    RngStream s(seed, salt ^ 0xD1B54A32D192ED03ULL);
    return s.next_u64();
}

} // namespace rfq
