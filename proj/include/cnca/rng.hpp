#pragma once

// Portable random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The distributions below are written out instead of using
// <random>'s distribution classes, whose algorithms differ between standard
// libraries. With both pinned, a seed reproduces the same corpus, the same
// initial weights and the same samples on any conforming toolchain.
//
//   uniform_below(n): rejection sampling on the top of the 64-bit range
//   uniform01():      53 high bits scaled by 2^-53, in [0, 1)
//   normal():         Box-Muller, one draw per call (the sine branch is dropped)
//   derive_seed(m,i): splitmix64 finaliser applied to m XOR i

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace cnca {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed i of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i) noexcept {
    return splitmix64(master ^ i);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Fisher-Yates shuffle driven by uniform_below.
    template <class Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cnca
