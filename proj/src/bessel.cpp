#include "sart/bessel.hpp"

#include <cmath>
#include <numbers>

namespace sart {

namespace {

// Below this the power series is used. The asymptotic expansion's smallest
// term is ~exp(-2z), so 8 is too early for 1e-10.
constexpr double kSeriesLimit = 16.0;

double j0_series(double z) {
    double q = -0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
    }
    return sum;
}

double j0_asymptotic(double z) {
    // Hankel expansion. a holds (-1)^k prod (2m-1)^2 / (k! (8z)^k); even k feed
    // P and odd k feed Q with alternating signs.
    double p = 0.0, q = 0.0;
    double a = 1.0;
    double last = 1e300;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) a *= -static_cast<double>((2 * k - 1) * (2 * k - 1)) / (8.0 * k * z);
        double mag = std::abs(a);
        if (mag > last) break;
        last = mag;
        int r = k % 4;
        if (r == 0) p += a;
        else if (r == 1) q += a;
        else if (r == 2) p -= a;
        else q -= a;
        if (mag < 1e-17) break;
    }
    double chi = z - 0.25 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double z) {
    z = std::abs(z);
    if (z <= kSeriesLimit) return j0_series(z);
    return j0_asymptotic(z);
}

double bessel_i0e(double x) {
    x = std::abs(x);
    if (x < 50.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        double c = static_cast<double>(2 * k - 1);
        term *= c * c / (8.0 * k * x);
        sum += term;
        if (term < 1e-17) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_i1e(double x) {
    double ax = std::abs(x), sg = x < 0.0 ? -1.0 : 1.0;
    if (ax < 50.0) return sg * std::cyl_bessel_i(1.0, ax) * std::exp(-ax);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        double c = static_cast<double>(2 * k - 1);
        term *= (c * c - 4.0) / (8.0 * k * ax);
        sum += term;
        if (std::abs(term) < 1e-17) break;
    }
    return sg * sum / std::sqrt(2.0 * std::numbers::pi * ax);
}

}  // namespace sart
