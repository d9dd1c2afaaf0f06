#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace polydyn {

/// SplitMix64 (Steele, Lea, Flood 2014). Every stochastic routine derives its
/// stream from one 64-bit seed via split(index), so results are reproducible
/// bit-for-bit and independent of thread scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Independent child stream; the parent state is not advanced.
    Rng split(std::uint64_t index) const {
        Rng mixer(state_ ^ (0xD1B54A32D192ED03ULL * (index + 1)));
        return Rng(mixer.next());
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform in {0, ..., n-1}; n > 0. Uses rejection to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }
    /// Standard normal by Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::complex<double> complex_normal() { return {normal(), normal()}; }
    /// Uniform in the disk of radius r.
    std::complex<double> in_disk(double r) {
        double rho = r * std::sqrt(uniform());
        return std::polar(rho, 2.0 * std::numbers::pi * uniform());
    }

  private:
    std::uint64_t state_;
};

} // namespace polydyn
