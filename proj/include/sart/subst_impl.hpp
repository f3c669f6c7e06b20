#pragma once

#include <cmath>
#include <numbers>

namespace sart {

template <class F>
double endpoint_integral(F&& f, double lo, double hi, std::size_t n0, double rel_tol, double abs_floor,
                         std::size_t n_max) {
    if (!(hi > lo)) return 0.0;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double hp = 0.5 * std::numbers::pi;
    auto eval = [&](std::size_t n) {
        const GaussRule& g = gauss_legendre(n);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double phi = hp * g.x[k];
            acc += g.w[k] * std::cos(phi) * f(c + h * std::sin(phi));
        }
        return acc * hp * h;
    };
    std::size_t n = n0;
    double prev = eval(n);
    while (2 * n <= n_max) {
        n *= 2;
        double cur = eval(n);
        double scale = std::max({std::abs(cur), std::abs(prev), abs_floor});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace sart
