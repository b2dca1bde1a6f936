#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace relmech {

// Deterministic random source. mt19937_64 output is specified by the
// standard, but the std::*_distribution wrappers are not, so uniform and
// normal variates are derived by hand to keep results byte-identical across
// compilers and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * unit(); }

    // Standard normal via Box-Muller; second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = unit();
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return eng_(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(unit() * (hi - lo + 1));
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace relmech
