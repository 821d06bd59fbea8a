#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace palearn {

// Deterministic random source shared by every module.
//
// std::mt19937_64 emits a bit stream that is pinned by the standard, but the
// standard *distributions* are implementation-defined, so the helpers below
// are hand-rolled. Identical seeds give identical draw sequences on any
// conforming toolchain, which is what makes experiment outputs byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform index in [0, n). n <= 1 consumes no engine state.
    std::size_t uniform_index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % bound;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();  // rejection keeps the draw unbiased
        return static_cast<std::size_t>(x % bound);
    }

    // Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform on [-s, s].
    double uniform_symmetric(double s) { return (2.0 * uniform_real() - 1.0) * s; }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const std::size_t j = i + uniform_index(v.size() - i);
            std::swap(v[i], v[j]);
        }
    }

    // k draws without replacement, returned in draw order.
    template <typename T>
    std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k) {
        for (std::size_t i = 0; i < k && i < items.size(); ++i) {
            const std::size_t j = i + uniform_index(items.size() - i);
            std::swap(items[i], items[j]);
        }
        items.resize(k < items.size() ? k : items.size());
        return items;
    }

    // Index drawn with probability proportional to weights[i] (entries must be
    // non-negative). Returns weights.size() without consuming state when the
    // total weight is zero; callers decide the fallback.
    std::size_t discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) return weights.size();
        const double u = uniform_real() * total;
        double cum = 0.0;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) last_positive = i;
            cum += weights[i];
            if (u < cum) return i;
        }
        return last_positive;  // u landed on the rounding edge of the last bin
    }

private:
    std::mt19937_64 engine_;
};

// Purpose tags for per-seed stream splitting. Keeping model initialization on
// its own stream means toggling selection options never perturbs the initial
// weights, so paired strategy comparisons share inits.
enum class Stream : std::uint64_t {
    PoolSeed = 1,
    ModelInit = 2,
    TrainShuffle = 3,
    Selection = 4,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (tag + 1));
    std::uint64_t z = splitmix64(state);
    return z ^ splitmix64(state);
}

inline Rng derive_rng(std::uint64_t seed, Stream stream) {
    return Rng(mix_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace palearn
