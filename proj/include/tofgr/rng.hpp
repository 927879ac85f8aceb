#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace tofgr {

// Deterministic random stream. All randomness in the project flows through
// this class so that results depend only on the seeds handed around, never
// on library-version details of <random> distributions.
//
// Core generator: splitmix64, which is compact, fast and has well-understood
// equidistribution for the stream lengths used here. Streams are derived by
// hashing a parent seed with a purpose tag plus integer coordinates, so
// independent parts of a run (per-participant, per-epoch, per-sequence) can
// draw without coupling their draw counts.
class RngStream {
public:
    RngStream() : state_(0x9e3779b97f4a7c15ULL) {}
    explicit RngStream(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
        // burn-in decorrelates trivially related seeds
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    /// Uniform in [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    float uniform_f(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Standard normal via Box-Muller. No spare caching: each call draws a
    /// fresh pair, which keeps draw counts predictable.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Child stream keyed by a tag and up to three integer coordinates.
    RngStream derive(std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0,
                     std::uint64_t c = 0) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64 over the tag bytes
        for (char ch : tag) {
            h ^= static_cast<std::uint8_t>(ch);
            h *= 0x100000001b3ULL;
        }
        h ^= mix(a + 1);
        h ^= mix(b + 2) >> 1;
        h ^= mix(c + 3) << 1;
        return RngStream(state_ ^ h);
    }

    /// Fisher-Yates shuffle with this stream.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    std::uint64_t state_;
};

}  // namespace tofgr
