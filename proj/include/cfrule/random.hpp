#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cfrule {

/// Deterministic random source. Distributions are computed here rather than
/// through <random>'s distribution classes so that streams are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    /// +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Seed for an independent sub-stream, mixed from a master seed and a stream
/// id (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace cfrule
