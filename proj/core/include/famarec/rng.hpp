#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace famarec {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream-splitting rule: acc = master; for each tag, acc = mix64(acc ^ mix64(tag)).
/// Every replicate, trial or window gets its own stream from (master, tags...),
/// so results do not depend on evaluation order or thread count.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t acc = master;
    for (const auto tag : tags) acc = mix64(acc ^ mix64(tag));
    return acc;
}

/// xoshiro256** 1.0, state filled from SplitMix64 of the seed. The output
/// sequence and all derived variates below are bit-identical across platforms;
/// nothing here goes through <random> distributions.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    [[nodiscard]] static constexpr result_type min() noexcept { return 0; }
    [[nodiscard]] static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform integer in [0, bound), bound > 0, without modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept;
    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace famarec
