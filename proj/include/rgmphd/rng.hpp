#pragma once

#include <cstdint>
#include <limits>

namespace rgmphd {

/// SplitMix64: a counter-based 64-bit generator. The state is a counter
/// advanced by a fixed odd increment; each output is a bijective mix of the
/// counter. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : counter_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    result_type operator()() {
        counter_ += kIncrement;
        return mix(counter_);
    }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t kIncrement = 0x9e3779b97f4a7c15ULL;

private:
    std::uint64_t counter_;
};

/// Seed of stream `index` under `master`: mix(master ^ mix(index + 1)).
/// Distinct indices give statistically independent streams.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return SplitMix64::mix(master ^ SplitMix64::mix(index + 1));
}

}  // namespace rgmphd
