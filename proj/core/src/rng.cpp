#include "fmcw/rng.hpp"

#include <cmath>
#include <numbers>

namespace fmcw {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::complex<double> Rng::complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

}  // namespace fmcw
