#pragma once

#include <cstdint>

namespace modshadow {

// Deterministic, platform-independent RNG (splitmix64). Experiment workers
// derive their stream from (global seed, sample index) so parallel runs
// aggregate identically to serial ones.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng for_sample(std::uint64_t seed, std::uint64_t index) {
        Rng r(seed);
        r.state_ += 0x9e3779b97f4a7c15ull * (index + 1);
        r.next_u64();
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace modshadow
