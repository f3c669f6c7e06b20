#pragma once

#include <cstddef>
#include <vector>

namespace sart {

// Four-point Lagrange interpolation on strictly monotone nodes (either
// direction). Queries outside the node range extrapolate from the end
// stencil.
double lagrange4(const std::vector<double>& nodes, const std::vector<double>& values, double t);

// Resample (nodes, values) onto many queries; nodes must be monotone.
std::vector<double> lagrange4_many(const std::vector<double>& nodes, const std::vector<double>& values,
                                   const std::vector<double>& queries);

// Midpoints (m + 1/2) * span / n, m < n.
std::vector<double> midpoints(double span, std::size_t n);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(std::size_t n);

// Integral over [lo, hi] of f after t = c + h sin(phi), which removes
// inverse square-root behaviour at both ends. Doubles the rule from n0
// nodes until successive results agree to rel_tol (relative to the larger
// magnitude, with abs_floor as the smallest scale), up to n_max nodes.
template <class F>
double endpoint_integral(F&& f, double lo, double hi, std::size_t n0, double rel_tol, double abs_floor,
                         std::size_t n_max);

}  // namespace sart

#include "sart/subst_impl.hpp"
