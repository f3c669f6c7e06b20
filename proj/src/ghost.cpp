#include "sart/ghost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "sart/bessel.hpp"
#include "sart/error.hpp"
#include "sart/fbp.hpp"
#include "sart/ortho.hpp"
#include "sart/subst.hpp"

namespace sart {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n > 0) w.front() = w.back() = 0.5 * h;
    if (n == 1) w[0] = h;
    return w;
}

double axis_value(double vmax, std::size_t n, std::size_t k) {
    return n > 1 ? vmax * static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
}

// Values of one data column as a plain vector.
std::vector<double> column(const DataField& d, double x) {
    const auto& g = d.grid();
    std::vector<double> v(g.n_radius);
    for (std::size_t j = 0; j < g.n_radius; ++j) v[j] = d.sample(x, g.r(j));
    return v;
}

}  // namespace

void GhostParams::validate() const {
    if (!(L > 0.0) || !(R > 0.0)) throw ValidationError("ghost geometry needs L > 0 and R > 0");
    if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("ghost parameters must be finite");
    if (family == GhostFamily::range && b < 0.0) throw ValidationError("range family needs b >= 0");
    if (family != GhostFamily::range && a < 0.0) throw ValidationError("even/odd families need a >= 0");
}

double eval_ghost_data(const GhostParams& p, double x, double r) {
    r = std::abs(r);
    if (p.family == GhostFamily::range) {
        if (x != p.a || !(r > p.R)) return 0.0;
        double s = std::sqrt(r * r - p.R * p.R);
        return std::cos(p.b * s) / s;
    }
    double ax = std::abs(x);
    if (!(ax > p.L) || !(r < p.R)) return 0.0;
    double xs = std::sqrt(ax * ax - p.L * p.L);
    double rs = std::sqrt(p.R * p.R - r * r);
    double v = bessel_j0(p.a * xs) * std::cos(static_cast<double>(p.l) * kPi * rs / p.R) / rs;
    return p.family == GhostFamily::odd ? x * v : v;
}

DataField ghost_data_field(const GhostParams& p, const DataGrid& dgrid) {
    p.validate();
    DataField out(dgrid);
    if (p.family == GhostFamily::range) {
        double fi = std::round((p.a - dgrid.track_min) / dgrid.d_track);
        if (fi < 0.0 || fi > static_cast<double>(dgrid.n_track - 1)) return out;
        auto i = static_cast<std::size_t>(fi);
        double x = dgrid.z(i);
        GhostParams q = p;
        q.a = x;
        for (std::size_t j = 0; j < dgrid.n_radius; ++j)
            out.at(i, j) = eval_ghost_data(q, x, dgrid.r(j)) / dgrid.d_track;
        return out;
    }
    for (std::size_t i = 0; i < dgrid.n_track; ++i)
        for (std::size_t j = 0; j < dgrid.n_radius; ++j) out.at(i, j) = eval_ghost_data(p, dgrid.z(i), dgrid.r(j));
    return out;
}

GhostTable project_unmeasured(const DataField& g_full, GhostFamily family, double L, double R,
                              const GhostParamGrid& pg, bool both_parities) {
    const auto& g = g_full.grid();
    if (!(L > 0.0) || !(R > 0.0)) throw ValidationError("ghost geometry needs L > 0 and R > 0");
    GhostTable t;
    t.family = family;
    t.L = L;
    t.R = R;
    t.params = pg;

    std::vector<double> rnodes(g.n_radius);
    for (std::size_t j = 0; j < g.n_radius; ++j) rnodes[j] = g.r(j);

    if (family == GhostFamily::range) {
        if (!(g.radius_max > R + 2.0 * g.d_radius)) throw ValidationError("data must extend beyond R");
        if (pg.n_b < 2 || !(pg.b_max > 0.0)) throw ValidationError("range projection needs n_b >= 2, b_max > 0");
        double spmax = std::sqrt(g.radius_max * g.radius_max - R * R);
        std::size_t beyond = 0;
        for (double r : rnodes) beyond += r > R;
        std::size_t ns = pg.n_sub ? pg.n_sub : std::max<std::size_t>(64, 4 * beyond);
        std::vector<double> sp = midpoints(spmax, ns), rq(ns);
        for (std::size_t n = 0; n < ns; ++n) rq[n] = std::sqrt(R * R + sp[n] * sp[n]);
        double h = spmax / static_cast<double>(ns);
        t.track_pos.resize(g.n_track);
        t.values.assign(g.n_track * pg.n_b, 0.0);
        for (std::size_t i = 0; i < g.n_track; ++i) {
            t.track_pos[i] = g.z(i);
            std::vector<double> col(g_full.values().begin() + static_cast<long>(i * g.n_radius),
                                    g_full.values().begin() + static_cast<long>((i + 1) * g.n_radius));
            auto gv = lagrange4_many(rnodes, col, rq);
            for (std::size_t k = 0; k < pg.n_b; ++k) {
                double b = axis_value(pg.b_max, pg.n_b, k);
                double acc = 0.0;
                for (std::size_t n = 0; n < ns; ++n) acc += sp[n] * std::cos(b * sp[n]) * gv[n];
                t.values[i * pg.n_b + k] = (2.0 / kPi) * acc * h;
            }
        }
        return t;
    }

    if (!(g.track_max > L + 2.0 * g.d_track) || !(-g.track_min > L + 2.0 * g.d_track))
        throw ValidationError("data must extend beyond |x| = L");
    if (g.radius_max < R - g.d_radius) throw ValidationError("data must cover r < R");
    if (pg.n_a < 2 || !(pg.a_max > 0.0)) throw ValidationError("even/odd projection needs n_a >= 2, a_max > 0");

    std::vector<std::size_t> rj;
    for (std::size_t j = 0; j < g.n_radius; ++j)
        if (g.r(j) < R) rj.push_back(j);
    std::vector<double> rsub(rj.size());
    for (std::size_t a = 0; a < rj.size(); ++a) rsub[a] = std::sqrt(R * R - g.r(rj[a]) * g.r(rj[a]));
    std::size_t nr = std::max<std::size_t>(2 * rj.size(), 2 * pg.l_max + 2);
    std::vector<double> qr = midpoints(R, nr);
    double hr = R / static_cast<double>(nr);

    std::vector<double> xs;
    for (std::size_t i = 0; i < g.n_track; ++i)
        if (g.z(i) > L && -g.z(i) >= g.track_min - 1e-12) xs.push_back(g.z(i));
    if (xs.size() < 4) throw ValidationError("too few track samples beyond L");
    std::vector<double> xsub(xs.size());
    for (std::size_t c = 0; c < xs.size(); ++c) xsub[c] = std::sqrt(xs[c] * xs[c] - L * L);
    double xpmax = xsub.back();
    std::size_t nx = pg.n_sub ? pg.n_sub : std::max<std::size_t>(64, 4 * xs.size());
    std::vector<double> qx = midpoints(xpmax, nx);
    double hx = xpmax / static_cast<double>(nx);

    auto table_for = [&](bool odd) {
        // c_l(x) for each data column beyond L.
        std::vector<std::vector<double>> cl(pg.l_max + 1, std::vector<double>(xs.size()));
        for (std::size_t c = 0; c < xs.size(); ++c) {
            auto gp = column(g_full, xs[c]), gm = column(g_full, -xs[c]);
            std::vector<double> u(rj.size());
            for (std::size_t a = 0; a < rj.size(); ++a) {
                double s = odd ? gp[rj[a]] - gm[rj[a]] : gp[rj[a]] + gm[rj[a]];
                u[a] = rsub[a] * s / (odd ? xs[c] : 1.0);
            }
            auto ur = lagrange4_many(rsub, u, qr);
            for (std::size_t l = 0; l <= pg.l_max; ++l) {
                double acc = 0.0;
                for (std::size_t m = 0; m < nr; ++m) acc += std::cos(static_cast<double>(l) * kPi * qr[m] / R) * ur[m];
                cl[l][c] = neumann(l) / (2.0 * R) * acc * hr;
            }
        }
        std::vector<double> out((pg.l_max + 1) * pg.n_a, 0.0);
        std::vector<double> j0tab(pg.n_a * nx);
        for (std::size_t k = 0; k < pg.n_a; ++k) {
            double a = axis_value(pg.a_max, pg.n_a, k);
            for (std::size_t n = 0; n < nx; ++n) j0tab[k * nx + n] = bessel_j0(a * qx[n]);
        }
        for (std::size_t l = 0; l <= pg.l_max; ++l) {
            auto cq = lagrange4_many(xsub, cl[l], qx);
            for (std::size_t k = 0; k < pg.n_a; ++k) {
                double a = axis_value(pg.a_max, pg.n_a, k);
                double acc = 0.0;
                for (std::size_t n = 0; n < nx; ++n) acc += qx[n] * j0tab[k * nx + n] * cq[n];
                out[l * pg.n_a + k] = a * acc * hx;
            }
        }
        return out;
    };

    t.values = table_for(family == GhostFamily::odd);
    if (family == GhostFamily::even && both_parities) t.odd_values = table_for(true);
    return t;
}

DataField recover_outside(const GhostTable& t, const DataGrid& dgrid) {
    dgrid.validate();
    DataField out(dgrid);
    const auto& pg = t.params;
    const double L = t.L, R = t.R;
    if (t.values.empty()) return out;

    if (t.family == GhostFamily::range) {
        auto w = trapezoid_weights(pg.n_b, pg.n_b > 1 ? pg.b_max / static_cast<double>(pg.n_b - 1) : 0.0);
        for (std::size_t i = 0; i < dgrid.n_track; ++i) {
            double x = dgrid.z(i);
            auto it = std::find_if(t.track_pos.begin(), t.track_pos.end(),
                                   [&](double a) { return std::abs(a - x) < 1e-9 * std::max(1.0, std::abs(x)); });
            if (it == t.track_pos.end()) continue;
            const double* G = t.values.data() + static_cast<std::size_t>(it - t.track_pos.begin()) * pg.n_b;
            for (std::size_t j = 0; j < dgrid.n_radius; ++j) {
                double r = dgrid.r(j);
                if (!(r > R + 0.5 * dgrid.d_radius)) continue;
                double s = std::sqrt(r * r - R * R);
                double acc = 0.0;
                for (std::size_t k = 0; k < pg.n_b; ++k) acc += w[k] * G[k] * std::cos(axis_value(pg.b_max, pg.n_b, k) * s);
                out.at(i, j) = acc / s;
            }
        }
        return out;
    }

    auto w = trapezoid_weights(pg.n_a, pg.n_a > 1 ? pg.a_max / static_cast<double>(pg.n_a - 1) : 0.0);
    auto sum_table = [&](const std::vector<double>& G, double xs, std::size_t l) {
        double acc = 0.0;
        for (std::size_t k = 0; k < pg.n_a; ++k)
            acc += w[k] * G[l * pg.n_a + k] * bessel_j0(axis_value(pg.a_max, pg.n_a, k) * xs);
        return acc;
    };
    for (std::size_t i = 0; i < dgrid.n_track; ++i) {
        double x = dgrid.z(i);
        if (!(std::abs(x) > L + 0.5 * dgrid.d_track)) continue;
        double xs = std::sqrt(x * x - L * L);
        std::vector<double> ce(pg.l_max + 1, 0.0), co(pg.l_max + 1, 0.0);
        for (std::size_t l = 0; l <= pg.l_max; ++l) {
            if (t.family == GhostFamily::odd) co[l] = sum_table(t.values, xs, l);
            else {
                ce[l] = sum_table(t.values, xs, l);
                if (!t.odd_values.empty()) co[l] = sum_table(t.odd_values, xs, l);
            }
        }
        for (std::size_t j = 0; j < dgrid.n_radius; ++j) {
            double r = dgrid.r(j);
            if (!(r < R - 0.5 * dgrid.d_radius)) continue;
            double rs = std::sqrt(R * R - r * r);
            double acc = 0.0;
            for (std::size_t l = 0; l <= pg.l_max; ++l)
                acc += std::cos(static_cast<double>(l) * kPi * rs / R) / rs * (ce[l] + x * co[l]);
            out.at(i, j) = acc;
        }
    }
    return out;
}

namespace {

// (cos(c sqrt|s^2 - R^2|) - beta) / sqrt|s^2 - R^2| on s > R (outside) or
// s < R, smoothed in the plane by a Gaussian of width sigma.
struct RadialProfile {
    bool outside = true;
    double R = 1.0, c = 0.0, beta = 0.0;

    double raw(double s) const {
        double w = std::abs(s * s - R * R);
        return (std::cos(c * std::sqrt(w)) - beta) / std::sqrt(w);
    }
    // raw(s) * sqrt|s - R|
    double regular(double s, double u) const {
        return (std::cos(c * u * std::sqrt(s + R)) - beta) / std::sqrt(s + R);
    }
};

// Smoothed value and its slope at radius rho.
std::pair<double, double> smooth_radial(const RadialProfile& p, double rho, double sigma) {
    double lo = rho - 9.0 * sigma, hi = rho + 9.0 * sigma;
    if (p.outside) lo = std::max(lo, p.R);
    else lo = std::max(lo, 0.0), hi = std::min(hi, p.R);
    if (!(hi > lo)) return {0.0, 0.0};
    const double s2 = sigma * sigma;
    auto kern = [&](double s, double& k, double& dk) {
        double e = std::exp(-0.5 * (rho - s) * (rho - s) / s2);
        double z = rho * s / s2;
        double i0 = bessel_i0e(z), i1 = bessel_i1e(z);
        k = s / s2 * e * i0;
        dk = s / (s2 * s2) * e * (s * i1 - rho * i0);
    };
    const auto& gl = gauss_legendre(8);
    const int panels = 24;
    double v = 0.0, dv = 0.0, k, dk;
    bool touches = p.outside ? lo == p.R : hi == p.R;
    if (touches) {
        // s = R +- u^2 takes the inverse square root out of the profile.
        double U = std::sqrt(p.outside ? hi - p.R : p.R - lo);
        double hp = U / panels;
        for (int m = 0; m < panels; ++m)
            for (std::size_t n = 0; n < gl.x.size(); ++n) {
                double u = hp * (m + 0.5 * (gl.x[n] + 1.0));
                double s = p.outside ? p.R + u * u : p.R - u * u;
                kern(s, k, dk);
                double f = 2.0 * p.regular(s, u) * 0.5 * hp * gl.w[n];
                v += f * k, dv += f * dk;
            }
    } else {
        double hp = (hi - lo) / panels;
        for (int m = 0; m < panels; ++m)
            for (std::size_t n = 0; n < gl.x.size(); ++n) {
                double s = lo + hp * (m + 0.5 * (gl.x[n] + 1.0));
                kern(s, k, dk);
                double f = p.raw(s) * 0.5 * hp * gl.w[n];
                v += f * k, dv += f * dk;
            }
    }
    return {v, dv};
}

// Slope of the smoothed profile on rho = j * d, j <= n, read by cubic
// interpolation.
struct SlopeTable {
    double d = 1.0;
    std::vector<double> dv;

    SlopeTable(const RadialProfile& p, double sigma, double rho_max) : d(sigma / 8.0) {
        auto n = static_cast<std::size_t>(std::ceil(rho_max / d)) + 4;
        dv.resize(n);
#pragma omp parallel for schedule(dynamic, 64)
        for (std::size_t j = 0; j < n; ++j) dv[j] = smooth_radial(p, static_cast<double>(j) * d, sigma).second;
    }
    double operator()(double rho) const {
        double f = rho / d;
        auto j = static_cast<std::size_t>(f);
        if (j + 2 >= dv.size()) return 0.0;
        if (j == 0) return dv[0] + (f) * (dv[1] - dv[0]);
        double t = f - static_cast<double>(j);
        double a = dv[j - 1], b = dv[j], c = dv[j + 1], e = dv[j + 2];
        double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
        return -a * t * tm * t2 / 6.0 + b * tp * tm * t2 / 2.0 - c * tp * t * t2 / 2.0 + e * tp * t * tm / 6.0;
    }
};

}  // namespace

Image ghost_image(const GhostParams& p, bool subtract_baseline, const ImageGrid& igrid,
                  const GhostImageOptions& opts) {
    p.validate();
    igrid.validate();
    double off = igrid.y0 / igrid.dy;
    if (std::abs(off - std::round(off)) > 1e-9) throw ValidationError("image rows must be aligned with the track");
    if (!(opts.smooth_px > 0.0)) throw ValidationError("ghost smoothing width must be positive");
    if (!(opts.y_extension >= 1.0)) throw ValidationError("y_extension must be >= 1");
    const double dy = igrid.dy, L = p.L, R = p.R;
    const double sigma = opts.smooth_px * std::max(igrid.dx, igrid.dy);
    const double ymax = std::max(std::abs(igrid.y0), std::abs(igrid.y_max()));
    const std::size_t nx = igrid.nx;
    const bool range = p.family == GhostFamily::range;
    const double kappa = InversionConstants::c1;

    RadialProfile prof;
    prof.outside = range;
    prof.R = R;
    prof.c = range ? p.b : static_cast<double>(p.l) * kPi / R;
    prof.beta = subtract_baseline ? 1.0 : 0.0;

    double xspan = 0.0;
    for (double x : {igrid.x0, igrid.x_max()}) xspan = std::max(xspan, std::abs(x - (range ? p.a : 0.0)));

    std::size_t ny;
    std::vector<double> v;
    if (range) {
        ny = static_cast<std::size_t>(std::ceil(opts.y_extension * std::max(ymax, R) / dy)) + 2;
        SlopeTable T(prof, sigma, std::hypot(xspan, static_cast<double>(ny) * dy) + sigma);
        v.assign(nx * ny, 0.0);
        for (std::size_t q = 1; q < ny; ++q) {
            double y = static_cast<double>(q) * dy;
            for (std::size_t i = 0; i < nx; ++i) {
                double rho = std::hypot(igrid.x(i) - p.a, y);
                v[q * nx + i] = T(rho) * y / rho;
            }
        }
    } else {
        const double reach = R + 9.0 * sigma;
        ny = static_cast<std::size_t>(std::ceil(std::max(ymax, reach) / dy)) + 2;
        SlopeTable T(prof, sigma, reach);
        // Track nodes on |t| > L, panels of sigma / 2.
        const double X = xspan + reach;
        const auto& gl = gauss_legendre(4);
        std::vector<double> tn, wa;
        if (X > L) {
            auto np = static_cast<std::size_t>(std::ceil((X - L) / (0.5 * sigma)));
            double hp = (X - L) / static_cast<double>(np);
            for (int side : {-1, 1})
                for (std::size_t m = 0; m < np; ++m)
                    for (std::size_t n = 0; n < gl.x.size(); ++n) {
                        double t = L + hp * (static_cast<double>(m) + 0.5 * (gl.x[n] + 1.0));
                        tn.push_back(side * t);
                        wa.push_back(0.5 * hp * gl.w[n] * bessel_j0(p.a * std::sqrt(t * t - L * L)));
                    }
        }
        std::vector<std::size_t> order(tn.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tn[a] < tn[b]; });
        std::vector<double> ts(tn.size()), ws(tn.size());
        for (std::size_t k = 0; k < order.size(); ++k) ts[k] = tn[order[k]], ws[k] = wa[order[k]];

        v.assign(nx * ny, 0.0);
#pragma omp parallel for schedule(dynamic)
        for (std::size_t q = 1; q < ny; ++q) {
            double y = static_cast<double>(q) * dy;
            if (!(y < reach)) continue;
            double half = std::sqrt(reach * reach - y * y);
            for (std::size_t i = 0; i < nx; ++i) {
                double x = igrid.x(i);
                auto b = std::lower_bound(ts.begin(), ts.end(), x - half) - ts.begin();
                auto e = std::upper_bound(ts.begin(), ts.end(), x + half) - ts.begin();
                double acc = 0.0;
                for (auto k = b; k < e; ++k) {
                    double rho = std::hypot(x - ts[k], y);
                    acc += ws[k] * T(rho) * y / rho;
                }
                v[q * nx + i] = acc;
            }
        }
    }

    auto h = hilbert_odd_halfplane(v, nx, ny);
    const auto nout = static_cast<std::size_t>(std::llround(ymax / dy)) + 1;

    if (range) {
        // Beyond the computed rows the smoothing is negligible; the rest of
        // the Hilbert integral, (1/pi) int v(t) 2t / (y^2 - t^2) dt, uses the
        // unsmoothed slope on a midpoint rule.
        const double y_lo = (static_cast<double>(ny) - 0.5) * dy;
        double scale = y_lo;
        if (p.b > 0.0) scale = std::min(scale, 2.0 * kPi / p.b);
        const double step = 0.05 * scale;
        const double y_hi = std::max(opts.far_extent * R, 2.0 * y_lo);
        auto nfar = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / step));
        auto slope = [&](double rho) {
            double s = std::sqrt(rho * rho - R * R);
            double c = std::cos(p.b * s) - prof.beta;
            return (-p.b * std::sin(p.b * s) * s - c) / (s * s) * rho / s;
        };
        std::vector<double> far(nx);
        for (std::size_t m = 0; m < nfar; ++m) {
            double t = y_lo + (static_cast<double>(m) + 0.5) * step;
            for (std::size_t i = 0; i < nx; ++i) {
                double rho = std::hypot(igrid.x(i) - p.a, t);
                far[i] = slope(rho) * t / rho;
            }
            for (std::size_t q = 0; q < nout; ++q) {
                double y = static_cast<double>(q) * dy;
                double k = step / kPi * 2.0 * t / (y * y - t * t);
                for (std::size_t i = 0; i < nx; ++i) h[q * nx + i] += k * far[i];
            }
        }
    }

    std::vector<double> out(igrid.size());
    const bool odd = p.family == GhostFamily::odd;
    for (std::size_t j = 0; j < igrid.ny; ++j) {
        auto q = static_cast<std::size_t>(std::llround(std::abs(igrid.y(j)) / dy));
        for (std::size_t i = 0; i < nx; ++i)
            out[j * nx + i] = kappa * h[q * nx + i] * (odd ? igrid.x(i) : 1.0);
    }
    Image img(igrid, std::move(out));
    img.require_finite("ghost image");
    return img;
}

}  // namespace sart
