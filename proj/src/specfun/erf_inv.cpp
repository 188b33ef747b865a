#include "spinsense/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace spinsense {

namespace {

// Giles' single-precision approximation, used as a starting point.
double erf_inv_guess(double x)
{
    double w = -std::log((1.0 - x) * (1.0 + x));
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * x;
}

}  // namespace

double erf_inv(double x)
{
    if (!(std::abs(x) < 1.0)) throw std::domain_error("erf_inv: |x| must be < 1");
    if (x == 0.0) return 0.0;
    const double ax = std::abs(x);
    double y = erf_inv_guess(ax);
    const double c = 2.0 / std::sqrt(kPi);
    for (int it = 0; it < 4; ++it) {
        // residual in the complementary form keeps precision near 1
        const double r = ax < 0.5 ? std::erf(y) - ax : (1.0 - ax) - std::erfc(y);
        const double d = c * std::exp(-y * y);
        const double step = r / d;
        // Halley correction
        y -= step / (1.0 + y * step);
        if (std::abs(step) < 1e-17 * y) break;
    }
    return x < 0 ? -y : y;
}

}  // namespace spinsense
