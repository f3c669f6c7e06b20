#include "sart/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "sart/bessel.hpp"
#include "sart/error.hpp"
#include "sart/fft.hpp"

namespace sart {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Four-point Lagrange interpolation at fractional index t of a uniform
// sequence. Returns false when t lies outside [0, n-1].
template <class T>
bool cubic_at(const T* v, std::size_t n, double t, T& out) {
    if (!(t >= 0.0) || t > static_cast<double>(n - 1)) return false;
    if (n < 4) {
        auto k = std::min(static_cast<std::size_t>(t), n - 2);
        double u = t - static_cast<double>(k);
        out = (1.0 - u) * v[k] + u * v[k + 1];
        return true;
    }
    auto k = static_cast<long>(std::floor(t)) - 1;
    k = std::clamp(k, 0L, static_cast<long>(n) - 4);
    double u = t - static_cast<double>(k);
    double l0 = -(u - 1) * (u - 2) * (u - 3) / 6.0;
    double l1 = u * (u - 2) * (u - 3) / 2.0;
    double l2 = -u * (u - 1) * (u - 3) / 2.0;
    double l3 = u * (u - 1) * (u - 2) / 6.0;
    out = l0 * v[k] + l1 * v[k + 1] + l2 * v[k + 2] + l3 * v[k + 3];
    return true;
}

Axis centered_axis(std::size_t n, double step) { return Axis{n, -static_cast<double>(n / 2) * step, step}; }

// Centred index k <-> FFT bin.
std::size_t bin_of(std::size_t k, std::size_t n) { return (k + n - n / 2) % n; }

void warn_tail(const std::vector<double>& f) {
    double mx = 0.0;
    for (double v : f) mx = std::max(mx, std::abs(v));
    if (mx > 0.0 && std::abs(f.back()) > 1e-3 * mx)
        std::cerr << "warning: hankel_j0 input does not decay at the last node (" << std::abs(f.back()) / mx
                  << " of max)\n";
}

Eigen::MatrixXd hankel_kernel(const RadialQuadrature& q, const std::vector<double>& rho) {
    Eigen::MatrixXd K(q.nodes.size(), rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k)
        for (std::size_t j = 0; j < q.nodes.size(); ++j)
            K(j, k) = q.weights[j] * q.nodes[j] * bessel_j0(q.nodes[j] * rho[k]);
    return K;
}

}  // namespace

RadialQuadrature RadialQuadrature::trapezoid(std::size_t n, double dr) {
    if (n < 2 || !(dr > 0.0)) throw ValidationError("trapezoid rule needs n >= 2 and dr > 0");
    RadialQuadrature q;
    q.nodes.resize(n);
    q.weights.assign(n, dr);
    for (std::size_t j = 0; j < n; ++j) q.nodes[j] = static_cast<double>(j) * dr;
    q.weights.front() = q.weights.back() = 0.5 * dr;
    return q;
}

RadialQuadrature RadialQuadrature::endpoint_singular(double R, std::size_t n) {
    if (n < 1 || !(R > 0.0)) throw ValidationError("endpoint rule needs n >= 1 and R > 0");
    RadialQuadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    double h = 0.5 * kPi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        double phi = (static_cast<double>(j) + 0.5) * h;
        q.nodes[j] = R * std::sin(phi);
        q.weights[j] = R * std::cos(phi) * h;
    }
    return q;
}

std::vector<double> hankel_j0(const std::vector<double>& samples, const RadialQuadrature& q,
                              const std::vector<double>& rho) {
    if (samples.size() != q.nodes.size()) throw ValidationError("hankel_j0: samples and nodes differ in length");
    std::vector<double> out(rho.size(), 0.0);
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < samples.size(); ++j)
            acc += samples[j] * q.nodes[j] * q.weights[j] * bessel_j0(q.nodes[j] * rho[k]);
        out[k] = acc;
    }
    return out;
}

std::vector<double> hankel_j0(const std::vector<double>& samples, double dr, const std::vector<double>& rho) {
    warn_tail(samples);
    return hankel_j0(samples, RadialQuadrature::trapezoid(samples.size(), dr), rho);
}

SpectralField data_spectrum(const DataField& data, const Axis& rho, double pad) {
    const auto& g = data.grid();
    const std::size_t nt = g.n_track, nr = g.n_radius;
    const std::size_t N = next_pow2(static_cast<std::size_t>(std::ceil(pad * static_cast<double>(nt))));
    const double dxi = 2.0 * kPi / (static_cast<double>(N) * g.d_track);

    std::vector<cplx> buf(nr * N, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nr; ++j) buf[j * N + i] = data.at(i, j);
    fft::transform(buf.data(), N, nr, 1, N, -1);

    // Real input: bins 0..N/2 suffice.
    const std::size_t nh = N / 2 + 1;
    Eigen::MatrixXd Xr(nh, nr), Xi(nh, nr);
    for (std::size_t b = 0; b < nh; ++b) {
        double xi = static_cast<double>(b) * dxi;
        cplx ph = std::polar(g.d_track, -xi * g.track_min);
        for (std::size_t j = 0; j < nr; ++j) {
            cplx v = ph * buf[j * N + b];
            Xr(b, j) = v.real();
            Xi(b, j) = v.imag();
        }
    }
    std::vector<double> rv(rho.n);
    for (std::size_t k = 0; k < rho.n; ++k) rv[k] = rho.at(k);
    Eigen::MatrixXd K = hankel_kernel(RadialQuadrature::trapezoid(nr, g.d_radius), rv);
    Eigen::MatrixXd Yr = Xr * K, Yi = Xi * K;

    SpectralField out(centered_axis(N, dxi), rho);
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t b = bin_of(k, N);
        bool neg = b >= nh;
        std::size_t src = neg ? N - b : b;
        for (std::size_t m = 0; m < rho.n; ++m) {
            cplx v(Yr(src, m), Yi(src, m));
            out.at(k, m) = neg ? std::conj(v) : v;
        }
    }
    return out;
}

SpectralField image_spectrum(const Image& img, std::size_t n_xi, std::size_t n_eta) {
    const auto& g = img.grid();
    auto row0 = g.track_row();
    if (!row0) throw ValidationError("image_spectrum needs the track row");
    if (n_xi < g.nx) throw ValidationError("image_spectrum: n_xi smaller than nx");
    std::vector<cplx> buf(n_xi * n_eta, cplx(0.0, 0.0));
    // Layout: eta fastest. Row y = m*dy goes to bins m and -m.
    for (std::size_t j = *row0; j < g.ny; ++j) {
        std::size_t m = j - *row0;
        if (2 * m >= n_eta) break;
        for (std::size_t i = 0; i < g.nx; ++i) {
            double v = img.at(i, j);
            buf[i * n_eta + m] = v;
            if (m > 0) buf[i * n_eta + (n_eta - m)] = v;
        }
    }
    fft::transform(buf.data(), n_eta, n_xi, 1, n_eta, -1);
    fft::transform(buf.data(), n_xi, n_eta, n_eta, 1, -1);
    const double dxi = 2.0 * kPi / (static_cast<double>(n_xi) * g.dx);
    const double deta = 2.0 * kPi / (static_cast<double>(n_eta) * g.dy);
    const double scale = g.dx * g.dy / (2.0 * kPi);
    SpectralField out(centered_axis(n_xi, dxi), centered_axis(n_eta, deta));
    for (std::size_t k = 0; k < n_xi; ++k) {
        std::size_t b = bin_of(k, n_xi);
        cplx ph = std::polar(scale, -out.xi.at(k) * g.x0);
        for (std::size_t p = 0; p < n_eta; ++p) out.at(k, p) = ph * buf[b * n_eta + bin_of(p, n_eta)];
    }
    return out;
}

SpectralField data_to_reflectivity_spectrum(const SpectralField& gspec, const Axis& eta) {
    SpectralField out(gspec.xi, eta);
    const Axis& rho = gspec.second;
    for (std::size_t k = 0; k < gspec.xi.n; ++k) {
        double xi = gspec.xi.at(k);
        const cplx* row = gspec.values.data() + k * rho.n;
        for (std::size_t p = 0; p < eta.n; ++p) {
            double e = eta.at(p);
            if (e == 0.0) continue;
            double r = std::sqrt(xi * xi + e * e);
            cplx v;
            if (!cubic_at(row, rho.n, (r - rho.start) / rho.step, v))
                throw ValidationError("data spectrum rho axis does not cover sqrt(xi^2 + eta^2)");
            out.at(k, p) = 0.5 * std::abs(e) * v;
        }
    }
    return out;
}

SpectralField reflectivity_to_data_spectrum(const SpectralField& fspec, const Axis& rho) {
    SpectralField out(fspec.xi, rho);
    const Axis& eta = fspec.second;
    for (std::size_t k = 0; k < fspec.xi.n; ++k) {
        double axi = std::abs(fspec.xi.at(k));
        const cplx* row = fspec.values.data() + k * eta.n;
        for (std::size_t m = 0; m < rho.n; ++m) {
            double r = rho.at(m);
            if (r <= axi + rho.step) continue;
            double s = std::sqrt(r * r - axi * axi);
            cplx a(0.0), b(0.0);
            bool ha = cubic_at(row, eta.n, (s - eta.start) / eta.step, a);
            bool hb = cubic_at(row, eta.n, (-s - eta.start) / eta.step, b);
            if (!ha) a = 0.0;
            if (!hb) b = ha ? a : cplx(0.0);
            out.at(k, m) = (a + b) / s;
        }
    }
    return out;
}

Image invert_fourier(const DataField& data, const ImageGrid& igrid) {
    data.require_finite("fourier inversion input");
    igrid.validate();
    if (!igrid.track_row() && igrid.y0 <= 0.0)
        throw ValidationError("image rows must be aligned with the track");
    const auto& g = data.grid();
    double ymax = std::max(std::abs(igrid.y0), std::abs(igrid.y_max()));
    if (igrid.x0 < g.track_min - 1e-9 || igrid.x_max() > g.track_max + 1e-9 || ymax > g.radius_max + 1e-9)
        throw ValidationError("data extent must cover the image extent");

    const double dy = igrid.dy;
    const auto half_rows = static_cast<std::size_t>(std::ceil(g.radius_max / dy)) + 1;
    const std::size_t Ny = next_pow2(4 * half_rows);
    const std::size_t Nx = next_pow2(2 * g.n_track);
    const double dxi = 2.0 * kPi / (static_cast<double>(Nx) * g.d_track);
    const double deta = 2.0 * kPi / (static_cast<double>(Ny) * dy);
    const double rho_top = std::hypot(kPi / g.d_track, kPi / dy);
    const double drho = std::min(dxi, deta);
    Axis rho{static_cast<std::size_t>(std::ceil(rho_top / drho)) + 4, 0.0, drho};

    SpectralField gs = data_spectrum(data, rho, 2.0);
    SpectralField fs = data_to_reflectivity_spectrum(gs, centered_axis(Ny, deta));

    // Back to FFT order with the x-origin phase, then invert.
    std::vector<cplx> buf(Nx * Ny);
    for (std::size_t k = 0; k < Nx; ++k) {
        cplx ph = std::polar(1.0, fs.xi.at(k) * g.track_min);
        std::size_t b = bin_of(k, Nx);
        for (std::size_t p = 0; p < Ny; ++p) buf[b * Ny + bin_of(p, Ny)] = ph * fs.at(k, p);
    }
    fft::transform(buf.data(), Ny, Nx, 1, Ny, +1);
    fft::transform(buf.data(), Nx, Ny, Ny, 1, +1);
    const double scale = dxi * deta / (2.0 * kPi);

    ImageGrid cg{g.n_track, half_rows, g.d_track, dy, g.track_min, 0.0};
    std::vector<double> cv(cg.size());
    for (std::size_t n = 0; n < half_rows; ++n)
        for (std::size_t m = 0; m < g.n_track; ++m) cv[n * cg.nx + m] = scale * buf[m * Ny + n].real();
    Image full(cg, std::move(cv));

    std::vector<double> v(igrid.size());
    for (std::size_t j = 0; j < igrid.ny; ++j)
        for (std::size_t i = 0; i < igrid.nx; ++i)
            v[j * igrid.nx + i] = full.sample(igrid.x(i), std::abs(igrid.y(j)));
    Image out(igrid, std::move(v));
    out.require_finite("fourier reconstruction");
    return out;
}

}  // namespace sart
