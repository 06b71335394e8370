#ifndef NERNST_RNG_HPP
#define NERNST_RNG_HPP

#include <cstdint>
#include <random>

namespace nernst {

/**
 * Seedable, splittable random stream.
 *
 * Child streams are keyed by (seed, index) through the SplitMix64 finalizer,
 * so per-trial streams do not depend on the order in which trials run.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    Rng split(std::uint64_t index) const { return Rng(mix(seed_ ^ mix(index))); }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace nernst

#endif // NERNST_RNG_HPP
