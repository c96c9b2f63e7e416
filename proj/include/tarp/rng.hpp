#pragma once

#include <cstdint>
#include <random>

namespace tarp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of substream `index` under a run seeded with `seed`. Replicates, datasets and
/// folds all draw from their own substream so results never depend on execution order.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// Substream tags keep the different consumers of a replicate seed apart.
enum class Stream : std::uint64_t {
    tuning = 1,      // m, psi draws
    screening = 2,   // gamma
    projection = 3,  // R
    sampler = 4,     // probit Gibbs
    folds = 5,       // k-fold shuffles
    data = 6         // simulation
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
    Rng(std::uint64_t seed, Stream stream)
        : engine_(mix64(substream_seed(seed, static_cast<std::uint64_t>(stream)))) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); safe to feed into log or an inverse CDF.
    double open_uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() { return normal_(engine_); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tarp
