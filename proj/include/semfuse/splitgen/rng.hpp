#pragma once

#include <cstdint>
#include <random>

namespace semfuse::splitgen {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic random stream. The engine output is fixed by the standard;
/// the distributions below are written out so results do not depend on the
/// standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(splitmix64(seed ^ splitmix64(stream + 1))) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) std::swap(first[i - 1], first[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace semfuse::splitgen
