#include "sart/subst.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "sart/error.hpp"

namespace sart {

namespace {

// Index of the interval [k, k+1] containing t for increasing nodes.
std::size_t locate_inc(const std::vector<double>& s, double t) {
    auto it = std::upper_bound(s.begin(), s.end(), t);
    long k = static_cast<long>(it - s.begin()) - 1;
    return static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(s.size()) - 2));
}

double lagrange_inc(const std::vector<double>& s, const std::vector<double>& v, double t) {
    const std::size_t n = s.size();
    if (n == 1) return v[0];
    if (n < 4) {
        std::size_t k = locate_inc(s, t);
        double u = (t - s[k]) / (s[k + 1] - s[k]);
        return (1.0 - u) * v[k] + u * v[k + 1];
    }
    long k = static_cast<long>(locate_inc(s, t)) - 1;
    k = std::clamp(k, 0L, static_cast<long>(n) - 4);
    double acc = 0.0;
    for (long a = k; a < k + 4; ++a) {
        double l = 1.0;
        for (long b = k; b < k + 4; ++b)
            if (b != a) l *= (t - s[b]) / (s[a] - s[b]);
        acc += l * v[a];
    }
    return acc;
}

}  // namespace

double lagrange4(const std::vector<double>& nodes, const std::vector<double>& values, double t) {
    if (nodes.empty() || nodes.size() != values.size()) throw ValidationError("lagrange4: bad node set");
    if (nodes.size() > 1 && nodes.front() > nodes.back()) {
        std::vector<double> s(nodes.rbegin(), nodes.rend()), v(values.rbegin(), values.rend());
        return lagrange_inc(s, v, t);
    }
    return lagrange_inc(nodes, values, t);
}

std::vector<double> lagrange4_many(const std::vector<double>& nodes, const std::vector<double>& values,
                                   const std::vector<double>& queries) {
    if (nodes.empty() || nodes.size() != values.size()) throw ValidationError("lagrange4: bad node set");
    std::vector<double> s = nodes, v = values;
    if (s.size() > 1 && s.front() > s.back()) {
        std::reverse(s.begin(), s.end());
        std::reverse(v.begin(), v.end());
    }
    std::vector<double> out(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) out[q] = lagrange_inc(s, v, queries[q]);
    return out;
}

std::vector<double> midpoints(double span, std::size_t n) {
    std::vector<double> m(n);
    for (std::size_t k = 0; k < n; ++k) m[k] = (static_cast<double>(k) + 0.5) * span / static_cast<double>(n);
    return m;
}

const GaussRule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, GaussRule> rules;
    std::lock_guard lock(mu);
    auto it = rules.find(n);
    if (it != rules.end()) return it->second;
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
            }
            pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        g.x[i] = -z;
        g.x[n - 1 - i] = z;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return rules.emplace(n, std::move(g)).first->second;
}

}  // namespace sart
