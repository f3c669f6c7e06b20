#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sart/grid.hpp"

namespace sart {

using cplx = std::complex<double>;

// Uniform axis: value(k) = start + k * step.
struct Axis {
    std::size_t n = 0;
    double start = 0.0, step = 1.0;
    double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
    double last() const { return at(n - 1); }
    bool operator==(const Axis&) const = default;
};

// Complex samples over (xi, second) with the second axis fastest. `second`
// is eta for reflectivity spectra and rho for data spectra.
struct SpectralField {
    Axis xi, second;
    std::vector<cplx> values;

    SpectralField() = default;
    SpectralField(const Axis& a0, const Axis& a1) : xi(a0), second(a1), values(a0.n * a1.n) {}

    cplx& at(std::size_t k0, std::size_t k1) { return values[k0 * second.n + k1]; }
    cplx at(std::size_t k0, std::size_t k1) const { return values[k0 * second.n + k1]; }
};

// Nodes and weights of a radial rule on [0, radius_max].
struct RadialQuadrature {
    std::vector<double> nodes, weights;

    // Trapezoid on r_j = j*dr, j < n.
    static RadialQuadrature trapezoid(std::size_t n, double dr);
    // r = R sin(phi) with midpoint phi nodes; integrates f(r)/sqrt(R^2 - r^2)
    // behaviour at r = R without loss of order.
    static RadialQuadrature endpoint_singular(double R, std::size_t n);
};

// H(rho) = sum_j f(r_j) r_j J0(r_j rho) w_j. `samples` are f at q.nodes.
std::vector<double> hankel_j0(const std::vector<double>& samples, const RadialQuadrature& q,
                              const std::vector<double>& rho);
// Trapezoid rule on the uniform grid j*dr.
std::vector<double> hankel_j0(const std::vector<double>& samples, double dr, const std::vector<double>& rho);

// Data spectrum ghat(xi, rho) = int int g(x, r) e^{-i x xi} r J0(r rho) dr dx.
// The x axis is zero-padded to a power of two >= pad * n_track; only the
// listed rho values are produced.
SpectralField data_spectrum(const DataField& data, const Axis& rho, double pad = 2.0);

// fhat(xi, eta) = (1/2pi) int int f e^{-i(x xi + y eta)} for an image
// whose rows below the track are supplied by evenness in y. The grid is
// zero-padded to the given sizes (powers of two). Axes in signed-frequency
// order starting at the most negative bin.
SpectralField image_spectrum(const Image& img_even, std::size_t n_xi, std::size_t n_eta);

// fhat(xi, eta) = 1/2 |eta| ghat(xi, sqrt(xi^2 + eta^2)), cubic in rho.
SpectralField data_to_reflectivity_spectrum(const SpectralField& gspec, const Axis& eta);

// ghat(xi, rho) = 2 fhat(xi, s)/s, s = sqrt(rho^2 - xi^2), for rho > |xi| plus
// one guard bin; zero inside the cone. fhat is symmetrised in eta.
SpectralField reflectivity_to_data_spectrum(const SpectralField& fspec, const Axis& rho);

// Fourier in x, Hankel in r, spectral map, inverse 2-D Fourier.
Image invert_fourier(const DataField& data, const ImageGrid& igrid);

}  // namespace sart
