#include "sart/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sart/error.hpp"

namespace sart {

namespace {

void same_grid(const Image& a, const Image& b) {
    if (!(a.grid() == b.grid())) throw ValidationError("images are on different grids");
}

void check_mask(const Image& a, const std::vector<unsigned char>& m) {
    if (!m.empty() && m.size() != a.grid().size()) throw ValidationError("mask size does not match the grid");
}

bool in(const std::vector<unsigned char>& m, std::size_t n) { return m.empty() || m[n]; }

}  // namespace

MetricKind parse_metric(const std::string& s) {
    if (s == "l2_relative") return MetricKind::l2_relative;
    if (s == "linf") return MetricKind::linf;
    if (s == "mirror_suppression_ratio") return MetricKind::mirror_suppression_ratio;
    if (s == "plateau_amplitude") return MetricKind::plateau_amplitude;
    throw ValidationError("unknown metric '" + s +
                          "' (l2_relative, linf, mirror_suppression_ratio, plateau_amplitude)");
}

std::string metric_name(MetricKind k) {
    switch (k) {
        case MetricKind::l2_relative: return "l2_relative";
        case MetricKind::linf: return "linf";
        case MetricKind::mirror_suppression_ratio: return "mirror_suppression_ratio";
        case MetricKind::plateau_amplitude: return "plateau_amplitude";
    }
    return "?";
}

std::vector<unsigned char> disc_mask(const ImageGrid& g, const Disc& d) {
    std::vector<unsigned char> m(g.size(), 0);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            m[j * g.nx + i] = std::hypot(g.x(i) - d.xc, g.y(j) - d.yc) <= d.radius;
    return m;
}

double l2_relative(const Image& a, const Image& ref, const std::vector<unsigned char>& mask) {
    same_grid(a, ref);
    check_mask(a, mask);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < a.values().size(); ++n) {
        if (!in(mask, n)) continue;
        double d = a.values()[n] - ref.values()[n];
        num += d * d;
        den += ref.values()[n] * ref.values()[n];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double linf(const Image& a, const Image& b, const std::vector<unsigned char>& mask) {
    same_grid(a, b);
    check_mask(a, mask);
    double m = 0.0;
    for (std::size_t n = 0; n < a.values().size(); ++n)
        if (in(mask, n)) m = std::max(m, std::abs(a.values()[n] - b.values()[n]));
    return m;
}

double mean_abs_error(const Image& a, const Image& b, const std::vector<unsigned char>& mask) {
    same_grid(a, b);
    check_mask(a, mask);
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t n = 0; n < a.values().size(); ++n)
        if (in(mask, n)) {
            s += std::abs(a.values()[n] - b.values()[n]);
            ++c;
        }
    if (c == 0) throw ValidationError("empty region");
    return s / static_cast<double>(c);
}

double mirror_suppression_ratio(const Image& a, const Disc& region, const Disc& mirror) {
    auto mt = disc_mask(a.grid(), region), mm = disc_mask(a.grid(), mirror);
    double pt = 0.0, pm = 0.0;
    std::size_t ct = 0, cm = 0;
    for (std::size_t n = 0; n < a.values().size(); ++n) {
        double v = std::abs(a.values()[n]);
        if (mt[n]) pt = std::max(pt, v), ++ct;
        if (mm[n]) pm = std::max(pm, v), ++cm;
    }
    if (ct == 0 || cm == 0) throw ValidationError("disc region contains no pixels");
    if (!(pt > 0.0)) throw NumericError("reconstruction vanishes on the true region");
    return pm / pt;
}

double plateau_amplitude(const Image& a, const Disc& region, double erosion) {
    Disc d = region;
    d.radius -= erosion * std::max(a.grid().dx, a.grid().dy);
    if (!(d.radius > 0.0)) throw ValidationError("erosion removes the whole disc");
    auto m = disc_mask(a.grid(), d);
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t n = 0; n < m.size(); ++n)
        if (m[n]) s += a.values()[n], ++c;
    if (c == 0) throw ValidationError("disc region contains no pixels");
    return s / static_cast<double>(c);
}

double ring_min_radius(const Image& a, double cx, double cy, const std::vector<double>& angles, double r_lo,
                       double r_hi, double step) {
    if (!(step > 0.0) || !(r_hi > r_lo)) throw ValidationError("ring_min_radius: bad radius range");
    const auto& g = a.grid();
    auto inside = [&](double x, double y) { return x >= g.x0 && x <= g.x_max() && y >= g.y0 && y <= g.y_max(); };
    std::vector<double> found;
    for (double th : angles) {
        double best = 0.0, br = 0.0;
        bool any = false;
        for (double r = r_lo; r <= r_hi; r += step) {
            double x = cx + r * std::cos(th), y = cy + r * std::sin(th);
            if (!inside(x, y)) continue;
            double v = a.sample(x, y);
            if (!any || v < best) best = v, br = r, any = true;
        }
        if (any) found.push_back(br);
    }
    if (found.empty()) throw ValidationError("ring_min_radius: no ray inside the grid");
    std::sort(found.begin(), found.end());
    std::size_t n = found.size();
    return n % 2 ? found[n / 2] : 0.5 * (found[n / 2 - 1] + found[n / 2]);
}

double compare(const Image& a, const Image& b, MetricKind kind, const CompareOptions& opts) {
    same_grid(a, b);
    switch (kind) {
        case MetricKind::l2_relative: return l2_relative(a, b, opts.mask);
        case MetricKind::linf: return linf(a, b, opts.mask);
        case MetricKind::mirror_suppression_ratio:
            if (!opts.region || !opts.mirror) throw ValidationError("mirror_suppression_ratio needs two disc regions");
            return mirror_suppression_ratio(a, *opts.region, *opts.mirror);
        case MetricKind::plateau_amplitude:
            if (!opts.region) throw ValidationError("plateau_amplitude needs a disc region");
            return plateau_amplitude(a, *opts.region, opts.erosion);
    }
    throw ValidationError("bad metric");
}

}  // namespace sart
