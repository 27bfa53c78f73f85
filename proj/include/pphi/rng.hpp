#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace pphi {

// Splittable deterministic generator. A stream is identified by the root
// seed plus up to three lane indices (chain, sample, purpose), so parallel
// workers draw identical values regardless of scheduling. The core is
// splitmix64 applied to a mixed counter.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t lane0 = 0,
                 std::uint64_t lane1 = 0, std::uint64_t lane2 = 0) {
        state_ = mix(mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) + lane0) + lane1) + lane2);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard real normal via polar Box-Muller (no library distribution so
    // that streams are identical across implementations).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Standard complex normal: E z = 0, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const double c = 1.0 / std::sqrt(2.0);
        return {c * normal(), c * normal()};
    }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace pphi
