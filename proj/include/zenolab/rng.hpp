#ifndef ZENOLAB_RNG_HPP
#define ZENOLAB_RNG_HPP

#include <cstdint>

namespace zeno::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer.  Portable and stateless; the whole seeding
/// contract of the Monte Carlo modules rests on it.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Per-trajectory seed as a stateless mix of master seed and index, so
/// results do not depend on execution order or worker count.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix64(master + (index + 1) * kGolden);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next()
    {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Uniform draw in the open interval (0, 1), 53-bit resolution.
    double uniform()
    {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace zeno::rng

#endif
