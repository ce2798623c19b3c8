#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace panpose {

// SplitMix64: the project-wide seeded generator. Chosen because it is a
// fixed, well-known 64-bit mixing function with no implementation-defined
// behavior, so splits and shuffles reproduce bit-for-bit across platforms
// and across reimplementations in other languages.
//
// Conventions relied on by the split/subsample tools:
//   * bounded draws use modulo reduction: next() % bound
//   * shuffles are Fisher-Yates from the back: for i = n-1..1, swap(i, next_below(i+1))
//   * doubles take the top 53 bits: (next() >> 11) * 2^-53
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller on two uniform draws.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

    // First n entries of a seeded shuffle of 0..count-1: a uniform
    // without-replacement sample.
    std::vector<std::size_t> sample_indices(std::size_t count, std::size_t n) {
        std::vector<std::size_t> idx(count);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        shuffle(idx);
        idx.resize(n < count ? n : count);
        return idx;
    }

private:
    std::uint64_t state_;
};

}  // namespace panpose
