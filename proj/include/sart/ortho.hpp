#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sart/grid.hpp"

namespace sart {

enum class Parity { even, odd };

struct BasisIndex {
    Parity parity = Parity::even;
    std::size_t k = 0, l = 0;
};

inline double neumann(std::size_t n) { return n == 0 ? 1.0 : 2.0; }

struct CoeffTable {
    std::size_t k_max = 0, l_max = 0;
    double L = 1.0, R = 1.0;
    std::vector<double> even, odd;  // (k_max+1) x (l_max+1), l fastest

    CoeffTable() = default;
    CoeffTable(std::size_t kmax, std::size_t lmax, double L_, double R_);

    double& at(Parity p, std::size_t k, std::size_t l) { return (p == Parity::even ? even : odd)[k * (l_max + 1) + l]; }
    double at(Parity p, std::size_t k, std::size_t l) const {
        return (p == Parity::even ? even : odd)[k * (l_max + 1) + l];
    }
};

// i_even / i_odd at (x, r); zero outside (0, L) x (0, R).
double eval_basis(const BasisIndex& idx, double x, double r, double L, double R);

// Same functions continued to x < 0: evenly for i_even, oddly for i_odd.
double eval_basis_signed(const BasisIndex& idx, double x, double r, double L, double R);

// Weighted inner product of two basis functions of the same parity on
// (0, L) x (0, R), by midpoint rules with n_nodes per axis in the
// substituted variables sqrt(L^2 - x^2), sqrt(R^2 - r^2).
double basis_gram(const BasisIndex& a, const BasisIndex& b, double L, double R, std::size_t n_nodes = 2048);

struct ProjectionOptions {
    // Midpoint nodes per substituted axis; 0 picks twice the number of data
    // nodes inside the region (at least 2 K + 2).
    std::size_t nodes_x = 0, nodes_r = 0;
};

// Coefficients of the data on (-L, L) x (0, R) against both families.
CoeffTable project_data(const DataField& data, std::size_t k_max, std::size_t l_max, double L, double R,
                        const ProjectionOptions& opts = {});

// Truncated double sum on the grid nodes inside the region (half a sample
// in from |x| = L and r = R); zero elsewhere.
DataField resynthesize(const CoeffTable& coeffs, const DataGrid& dgrid);

struct BasisOptions {
    double rel_tol = 1e-6;
    std::size_t max_nodes = 4096;
};

// The inversion formula applied to the basis function on (-L, L) x (0, R),
// extended by zero: 1/2 H_y d/dy of the track convolution of the two
// radial kernels. The odd image is x times the even-form field.
Image basis_reconstruction(const BasisIndex& idx, const ImageGrid& igrid, double L, double R,
                           const BasisOptions& opts = {});

struct OrthoOptions {
    double L = 0.0, R = 0.0;  // 0: largest region the data covers
    std::string cache_dir;    // empty: no disk cache
    ProjectionOptions projection;
    BasisOptions basis;
};

Image invert_ortho(const DataField& data, std::size_t k_max, std::size_t l_max, const ImageGrid& igrid,
                   const OrthoOptions& opts = {});

// File name used for a cached basis reconstruction.
std::string basis_cache_key(const BasisIndex& idx, const ImageGrid& igrid, double L, double R);

}  // namespace sart
