#pragma once

#include <cmath>
#include <cstdint>

namespace flip {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Order-sensitive combiner used to derive independent child streams
// (worker RNGs, per-step noise seeds) from one master seed.
inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return splitmix64(s);
}

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return seed_mix(seed_mix(a, b), c);
}

// xoshiro256** seeded through splitmix64. Self-contained so that streams are
// bit-reproducible across platforms and standard-library versions; the
// std::<distribution> adapters are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 bits of mantissa.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1ull;
        // Lemire's multiply-shift with rejection of the biased tail.
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * span;
        auto l = static_cast<std::uint64_t>(m);
        if (l < span) {
            const std::uint64_t floor = (-span) % span;
            while (l < floor) {
                x = next();
                m = static_cast<__uint128_t>(x) * span;
                l = static_cast<std::uint64_t>(m);
            }
        }
        return lo + static_cast<std::int64_t>(m >> 64);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        // Box-Muller; 1 - u keeps the log argument strictly positive.
        const double u = 1.0 - uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double phi = 2.0 * 3.14159265358979323846 * v;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return mean + stddev * r * std::cos(phi);
    }

    std::uint64_t seed() const { return seed_; }

    // Independent child stream; deterministic in (seed, stream).
    Rng derive(std::uint64_t stream) const { return Rng(seed_mix(seed_, stream)); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t state_[4]{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace flip
