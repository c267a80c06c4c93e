#ifndef OCSTAB_RNG_HPP
#define OCSTAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ocstab {

/// Seeded generator with platform-independent draws. std::mt19937_64 is
/// bit-exact everywhere; the distribution helpers below avoid the
/// implementation-defined std:: distributions so reports reproduce byte
/// for byte across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t raw() { return eng_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
};

}  // namespace ocstab

#endif
