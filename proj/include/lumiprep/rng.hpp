#pragma once

#include <cstdint>
#include <vector>

namespace lumiprep {

// Portable deterministic RNG used wherever reproducibility across platforms
// and standard-library versions is part of the contract (dataset splits,
// synthetic scenes). 64-bit LCG with Knuth's MMIX constants; bounded values
// come from a fixed multiply-shift mapping, never from std::uniform_*.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

    // Uniform-ish value in [0, n); n must be > 0.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(next_u32()) * n) >> 32);
    }

    // Integer in [lo, hi] inclusive.
    int next_in(int lo, int hi) {
        return lo + static_cast<int>(next_below(static_cast<std::uint32_t>(hi - lo + 1)));
    }

private:
    std::uint64_t state_;
};

// Fisher-Yates with the LCG above; identical permutation for identical seed
// on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Lcg64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace lumiprep
