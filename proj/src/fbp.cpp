#include "sart/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "sart/error.hpp"
#include "sart/fft.hpp"

namespace sart {

namespace {

using fft::cplx;

std::vector<double> radial_derivative(const DataField& data) {
    const auto& g = data.grid();
    std::vector<double> d(g.size());
    const std::size_t nr = g.n_radius;
    const double h = g.d_radius;
    for (std::size_t i = 0; i < g.n_track; ++i) {
        const double* row = data.values().data() + i * nr;
        double* out = d.data() + i * nr;
        out[0] = (row[1] - row[0]) / h;
        out[nr - 1] = (row[nr - 1] - row[nr - 2]) / h;
        if (nr > 2) {
            out[1] = (row[2] - row[0]) / (2.0 * h);
            out[nr - 2] = (row[nr - 1] - row[nr - 3]) / (2.0 * h);
        }
        for (std::size_t j = 2; j + 2 < nr; ++j)
            out[j] = (8.0 * (row[j + 1] - row[j - 1]) - (row[j + 2] - row[j - 2])) / (12.0 * h);
    }
    return d;
}

// Cubic (four-point) interpolation in the fractional index, linear in the
// end intervals; zero beyond the last sample.
inline double interp_row(const double* row, std::size_t nr, double fr) {
    auto j = static_cast<std::size_t>(fr);
    if (j >= nr - 1) return j == nr - 1 && fr == static_cast<double>(nr - 1) ? row[nr - 1] : 0.0;
    double t = fr - static_cast<double>(j);
    if (j == 0 || j + 2 >= nr) return (1.0 - t) * row[j] + t * row[j + 1];
    double a = row[j - 1], b = row[j], c = row[j + 1], e = row[j + 2];
    double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
    return -a * t * tm * t2 / 6.0 + b * tp * tm * t2 / 2.0 - c * tp * t * t2 / 2.0 + e * tp * t * tm / 6.0;
}

// Backprojection on rows ys (all > 0, or 0 for a zero row) for the given x samples.
std::vector<double> backproject_rows(const DataField& data, const std::vector<double>& deriv,
                                     const std::vector<double>& xs, const std::vector<double>& ys,
                                     ContinuationMode mode) {
    const auto& g = data.grid();
    const std::size_t nx = xs.size(), nr = g.n_radius, ny = ys.size();
    const double inv_dr = 1.0 / g.d_radius;
    const double rmax_idx = static_cast<double>(nr - 1);
    std::vector<double> out(nx * ny, 0.0);

    for (std::size_t i = 0; i < g.n_track; ++i) {
        const double z = g.z(i);
        const double w = (i == 0 || i + 1 == g.n_track) ? 0.5 * g.d_track : g.d_track;
        const double* row = deriv.data() + i * nr;
#pragma omp parallel for schedule(static)
        for (std::size_t q = 0; q < ny; ++q) {
            const double y = ys[q], y2 = y * y;
            if (!(y > 0.0)) continue;
            double* o = out.data() + q * nx;
            for (std::size_t p = 0; p < nx; ++p) {
                double ex = xs[p] - z;
                double rho = std::sqrt(ex * ex + y2);
                double fr = rho * inv_dr;
                if (fr > rmax_idx) continue;
                o[p] += w * (y / rho) * interp_row(row, nr, fr);
            }
        }
    }

    if (mode == ContinuationMode::approximate) {
        const double zmin = g.track_min, zmax = g.track_max;
        const double* row0 = deriv.data();
        const double* row1 = deriv.data() + (g.n_track - 1) * nr;
        for (std::size_t q = 0; q < ny; ++q) {
            const double y = ys[q];
            if (!(y > 0.0)) continue;
            double* o = out.data() + q * nx;
            for (std::size_t p = 0; p < nx; ++p) {
                const double x = xs[p];
                // (rho^2 / y) * d_y g = rho * d_r g since d_y g = (y / rho) d_r g.
                double rho_a = std::hypot(x - zmin, y);
                double rho_b = std::hypot(x - zmax, y);
                double ta = 0.0, tb = 0.0;
                if (rho_a * inv_dr <= rmax_idx)
                    ta = (0.5 * std::numbers::pi - std::atan((x - zmin) / y)) * rho_a *
                         interp_row(row0, nr, rho_a * inv_dr);
                if (rho_b * inv_dr <= rmax_idx)
                    tb = (0.5 * std::numbers::pi + std::atan((x - zmax) / y)) * rho_b *
                         interp_row(row1, nr, rho_b * inv_dr);
                o[p] += ta + tb;
            }
        }
    }
    return out;
}

std::vector<double> backproject_half(const DataField& data, const std::vector<double>& xs, std::size_t ny,
                                     double dy, ContinuationMode mode) {
    std::vector<double> ys(ny);
    for (std::size_t q = 0; q < ny; ++q) ys[q] = static_cast<double>(q) * dy;
    return backproject_rows(data, radial_derivative(data), xs, ys, mode);
}

std::vector<double> xs_of(const ImageGrid& g) {
    std::vector<double> xs(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) xs[i] = g.x(i);
    return xs;
}

void require_track_alignment(const ImageGrid& g) {
    g.validate();
    double j = -g.y0 / g.dy;
    if (std::abs(j - std::round(j)) > 1e-9)
        throw ValidationError("image rows must be aligned with the track (y0 a multiple of dy)");
}

// Rows of the half plane needed to cover every |y| of g.
std::size_t half_rows(const ImageGrid& g) {
    double ymax = std::max(std::abs(g.y0), std::abs(g.y_max()));
    return static_cast<std::size_t>(std::llround(ymax / g.dy)) + 1;
}

// Map a half-plane field (rows |y|) onto g with the given parity in y.
Image fold_to_grid(const std::vector<double>& half, std::size_t nx, const ImageGrid& g, double parity) {
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.ny; ++j) {
        double y = g.y(j);
        auto q = static_cast<std::size_t>(std::llround(std::abs(y) / g.dy));
        double s = (y < 0.0) ? parity : 1.0;
        for (std::size_t i = 0; i < g.nx; ++i) v[j * g.nx + i] = s * half[q * nx + i];
    }
    return Image(g, std::move(v));
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

std::vector<double> hilbert_odd_halfplane(const std::vector<double>& v, std::size_t nx, std::size_t ny) {
    // Linear convolution with the discrete kernel 2/(pi k), k odd, over the
    // odd extension (rows -(ny-1) .. ny-1); no periodic wrap.
    const std::size_t m = 2 * ny - 1;
    const std::size_t n = next_pow2(2 * m);
    std::vector<cplx> ker(n, cplx(0.0, 0.0));
    for (std::size_t k = 1; k < m; k += 2) {
        double w = 2.0 / (std::numbers::pi * static_cast<double>(k));
        ker[k] = w;
        ker[n - k] = -w;
    }
    fft::transform(ker.data(), n, -1);

    std::vector<cplx> col(n * nx, cplx(0.0, 0.0));
    // Column p occupies [p*n, (p+1)*n); entry k holds row k - (ny - 1).
    for (std::size_t p = 0; p < nx; ++p) {
        cplx* c = col.data() + p * n;
        for (std::size_t q = 1; q < ny; ++q) {
            c[ny - 1 + q] = v[q * nx + p];
            c[ny - 1 - q] = -v[q * nx + p];
        }
    }
    fft::transform(col.data(), n, nx, 1, n, -1);
    for (std::size_t p = 0; p < nx; ++p) {
        cplx* c = col.data() + p * n;
        for (std::size_t k = 0; k < n; ++k) c[k] *= ker[k];
    }
    fft::transform(col.data(), n, nx, 1, n, +1);
    std::vector<double> out(nx * ny);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t p = 0; p < nx; ++p)
        for (std::size_t q = 0; q < ny; ++q) out[q * nx + p] = col[p * n + ny - 1 + q].real() * inv;

    return out;
}

std::vector<double> ddy_even_halfplane(const std::vector<double>& v, std::size_t nx, std::size_t ny, double dy) {
    std::vector<double> d(nx * ny, 0.0);
    for (std::size_t q = 1; q < ny; ++q)
        for (std::size_t p = 0; p < nx; ++p) {
            double up = q + 1 < ny ? v[(q + 1) * nx + p] : v[q * nx + p];
            double dn = v[(q - 1) * nx + p];
            double h = q + 1 < ny ? 2.0 * dy : dy;
            d[q * nx + p] = (up - dn) / h;
        }
    return d;
}

Image backproject_deriv(const DataField& data, const ImageGrid& igrid, ContinuationMode mode) {
    data.require_finite("backprojection input");
    require_track_alignment(igrid);
    std::size_t ny = half_rows(igrid);
    auto half = backproject_half(data, xs_of(igrid), ny, igrid.dy, mode);
    return fold_to_grid(half, igrid.nx, igrid, -1.0);
}

Image hilbert_y(const Image& img) {
    const auto& g = img.grid();
    if (g.ny < 4) throw ValidationError("hilbert_y needs ny >= 4");
    const std::size_t n = g.ny, nx = g.nx;
    std::vector<cplx> col(n * nx);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < nx; ++i) col[i * n + j] = img.at(i, j);
    fft::transform(col.data(), n, nx, 1, n, -1);
    for (std::size_t i = 0; i < nx; ++i) {
        cplx* c = col.data() + i * n;
        for (std::size_t k = 0; k < n; ++k) {
            long f = fft::freq_index(k, n);
            if (f == 0 || (n % 2 == 0 && k == n / 2)) c[k] = 0.0;
            else c[k] *= f > 0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
        }
    }
    fft::transform(col.data(), n, nx, 1, n, +1);
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < nx; ++i) v[j * nx + i] = col[i * n + j].real() / static_cast<double>(n);
    return Image(g, std::move(v));
}

Image invert_fbp(const DataField& data, const ImageGrid& igrid, const FbpOptions& opts) {
    data.require_finite("inversion input");
    require_track_alignment(igrid);
    if (!(opts.y_extension >= 1.0)) throw ValidationError("y_extension must be >= 1");
    if (opts.far_stride < 1) throw ValidationError("far_stride must be >= 1");
    const std::size_t nx = igrid.nx, ny = half_rows(igrid);
    const double dy = igrid.dy;
    auto ext = static_cast<std::size_t>(std::ceil(opts.y_extension * static_cast<double>(ny)));
    // Rows beyond the largest measured radius are exactly zero.
    auto reach = static_cast<std::size_t>(std::ceil(data.grid().radius_max / dy)) + 2;
    ext = std::min(ext, std::max(ny, reach));

    const auto deriv = radial_derivative(data);
    const auto xs = xs_of(igrid);
    std::vector<double> ys(ext);
    for (std::size_t q = 0; q < ext; ++q) ys[q] = static_cast<double>(q) * dy;
    auto half = backproject_rows(data, deriv, xs, ys, opts.mode);
    auto h = hilbert_odd_halfplane(half, nx, ext);

    if (reach > ext && opts.far_field) {
        // Far rows on a coarse midpoint rule; their Hilbert contribution is a
        // smooth integral there: (1/pi) int v(t) 2t / (y^2 - t^2) dt.
        const double step = static_cast<double>(opts.far_stride) * dy;
        const double y_lo = (static_cast<double>(ext) - 0.5) * dy;
        const double y_hi = static_cast<double>(reach) * dy;
        auto nfar = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / step));
        std::vector<double> yf(nfar);
        for (std::size_t m = 0; m < nfar; ++m) yf[m] = y_lo + (static_cast<double>(m) + 0.5) * step;
        auto far = backproject_rows(data, deriv, xs, yf, opts.mode);
        const double scale = step / std::numbers::pi;
        for (std::size_t q = 0; q < ny; ++q) {
            const double y = static_cast<double>(q) * dy;
            double* o = h.data() + q * nx;
            for (std::size_t m = 0; m < nfar; ++m) {
                const double t = yf[m], k = scale * 2.0 * t / (y * y - t * t);
                const double* f = far.data() + m * nx;
                for (std::size_t p = 0; p < nx; ++p) o[p] += k * f[p];
            }
        }
    }
    for (double& x : h) x *= InversionConstants::c1;
    Image out = fold_to_grid(h, nx, igrid, 1.0);
    out.require_finite("fbp reconstruction");
    return out;
}

}  // namespace sart
