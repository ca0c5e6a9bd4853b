#pragma once

#include <cmath>
#include <cstdint>

namespace dtks {

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that every seeded
// pipeline is bit-reproducible across runs and thread counts; the standard
// library distributions are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Independent substream for a (seed, index) pair, e.g. one per
    // Monte-Carlo replication.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t a = splitmix64(sm);
        std::uint64_t b = index + 0x9e3779b97f4a7c15ULL;
        b = (b ^ (b >> 30)) * 0xbf58476d1ce4e5b9ULL;
        b = (b ^ (b >> 27)) * 0x94d049bb133111ebULL;
        b ^= b >> 31;
        Rng r(a ^ b);
        r.next();  // decouple nearby substreams a little further
        return r;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1].
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; deterministic draw count (two uniforms
    // per pair, the spare is cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Deterministic derived seed for nested seeded stages (e.g. the critical
// value inside replication r of a study).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage) {
    std::uint64_t s = seed ^ (0x517cc1b727220a95ULL * (stage + 1));
    return Rng::splitmix64(s);
}

}  // namespace dtks
