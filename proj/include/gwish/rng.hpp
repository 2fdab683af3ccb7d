#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "gwish/common.hpp"

namespace gwish {

// Deterministic random stream.  The engine (std::mt19937_64) and every
// variate transform below are fully specified here, so a seed produces the
// same sequence on any platform / standard library.  std::*_distribution
// adapters are deliberately not used: their algorithms are
// implementation-defined.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on (0,1); 53-bit mantissa, zero excluded.
    double uniform() {
        for (;;) {
            double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    // Uniform integer in [0, n); rejection keeps it exactly uniform.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            std::uint64_t x = eng_();
            if (x < limit) return x % n;
        }
    }

    // Standard normal via Box-Muller; the spare coordinate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Gamma(shape, scale=1), Marsaglia-Tsang squeeze; shape < 1 handled by
    // the boost relation gamma(a) = gamma(a+1) * U^(1/a).
    double gamma(double shape, double scale = 1.0) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw std::invalid_argument("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            double g = gamma(shape + 1.0, 1.0);
            double u = uniform();
            return scale * g * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
        }
    }

    // Chi-square with (possibly fractional) degrees of freedom.
    double chi_square(double dof) {
        if (!(dof > 0.0)) throw std::invalid_argument("chi_square: dof must be positive");
        return gamma(0.5 * dof, 2.0);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gwish
