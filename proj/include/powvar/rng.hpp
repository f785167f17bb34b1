#pragma once

#include <cmath>
#include <cstdint>

namespace powvar {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's public-domain constants).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Replicate k of a batch gets seed mix64(base ^ k * 2^64/phi).  Both maps are
// bijections on 64-bit words, so the derivation is injective in k for fixed
// base.  Any reimplementation that reproduces this map reproduces our streams.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
    return mix64(base ^ (k * kGoldenGamma));
}

// Deterministic stream: splitmix64 state advance + explicit Box-Muller for
// normals, so sequences do not depend on the standard library in use.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGoldenGamma);
        return mix64(z);
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe as log() argument
    double uniform_pos() { return 1.0 - uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // Knuth product method; fine for the desk-scale means used here.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t count = 0;
        double product = uniform_pos();
        while (product > limit) {
            ++count;
            product *= uniform_pos();
        }
        return count;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace powvar
