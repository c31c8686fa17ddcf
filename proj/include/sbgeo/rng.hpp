#pragma once

#include <cstdint>

namespace sbgeo {

// Counter-based generator (splitmix64 applied to seed/counter mixes).
// Values depend only on (seed, stream, counter), never on call order or
// scheduling, which is what makes parallel case sweeps reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t x = seed_;
        x ^= 0x9e3779b97f4a7c15ULL + stream * 0xbf58476d1ce4e5b9ULL;
        x = mix(x);
        x ^= counter * 0x94d049bb133111ebULL + 0x2545f4914f6cdd1dULL;
        return mix(x);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

// Sequential view over one stream of a CounterRng.
class RngStream {
public:
    RngStream(const CounterRng& rng, std::uint64_t stream)
        : rng_(&rng), stream_(stream) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(rng_->bits(stream_, counter_++) >> 11) *
               (1.0 / 9007199254740992.0);
    }

    // Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    // Uniform in [lo, hi).
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    const CounterRng* rng_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace sbgeo
