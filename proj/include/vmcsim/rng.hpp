#pragma once

#include <cstdint>
#include <random>

namespace vmc {

// splitmix64 step; used both as a stream-derivation mixer and to expand a
// seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic sub-stream seed from a root seed plus salts. Feeding the
// salts through the mixer one at a time keeps (seed, a, b) and (seed, b, a)
// distinct.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt_a,
                                 std::uint64_t salt_b = 0) {
    std::uint64_t s = root;
    std::uint64_t z = splitmix64(s);
    s ^= salt_a;
    z ^= splitmix64(s);
    s ^= salt_b;
    z ^= splitmix64(s);
    return z;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace vmc
