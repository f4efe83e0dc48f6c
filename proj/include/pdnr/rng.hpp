#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace pdnr {

// SplitMix64; used both as a seed mixer and as the base generator for the
// per-trajectory Gaussian streams. Trajectory k's stream is a pure function
// of (seed, k), so ensembles are reproducible under any worker scheduling.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_index) {
    SplitMix64 mixer(seed);
    std::uint64_t a = mixer.next();
    SplitMix64 mixer2(a ^ (stream_index * 0xD1342543DE82EF95ull + 0x9E3779B97F4A7C15ull));
    mixer2.next();
    return mixer2.next();
}

// Standard-normal pairs via Box-Muller on top of SplitMix64. Exactly two
// raw draws per pair, so stream consumption is easy to reason about.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream_index)
        : gen_(derive_stream_seed(seed, stream_index)) {}

    void normal_pair(double& g1, double& g2) {
        // u1 in (0,1], u2 in [0,1)
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        g1 = r * std::cos(a);
        g2 = r * std::sin(a);
    }

    // Complex Wiener increment over dt: (g1 + i g2) * sqrt(dt/2), which gives
    // E[dxi dxi*] = dt and E[dxi^2] = 0.
    std::complex<double> wiener_increment(double dt) {
        double g1 = 0.0, g2 = 0.0;
        normal_pair(g1, g2);
        const double s = std::sqrt(0.5 * dt);
        return {s * g1, s * g2};
    }

  private:
    double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

    SplitMix64 gen_;
};

}  // namespace pdnr
