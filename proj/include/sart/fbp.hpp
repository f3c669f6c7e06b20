#pragma once

#include "sart/grid.hpp"

namespace sart {

enum class ContinuationMode { zero_fill, approximate };

struct InversionConstants {
    static constexpr double c1 = 0.5;
};

// Track integral of d/dy g(z, sqrt((x-z)^2 + y^2)). Row y = 0 is zero; rows
// below the track follow from oddness in y.
Image backproject_deriv(const DataField& data, const ImageGrid& igrid, ContinuationMode mode);

// Column-wise Hilbert transform, multiplier -i sgn(eta), DC and Nyquist zeroed.
Image hilbert_y(const Image& img);

struct FbpOptions {
    ContinuationMode mode = ContinuationMode::zero_fill;
    // The backprojection is evaluated up to y_extension times the image
    // height before the (nonlocal) Hilbert step, then cropped.
    double y_extension = 2.0;
    // Rows past the extension, up to the largest measured radius, are
    // sampled every far_stride rows and enter the Hilbert step by quadrature.
    long far_stride = 4;
    bool far_field = true;
};

Image invert_fbp(const DataField& data, const ImageGrid& igrid, const FbpOptions& opts);
inline Image invert_fbp(const DataField& data, const ImageGrid& igrid, ContinuationMode mode) {
    return invert_fbp(data, igrid, FbpOptions{mode});
}

// Hilbert transform in y of a field known on rows y_j = j*dy, j < ny, and
// extended oddly to y < 0. Returns the even result on the same rows. Values
// are x-fastest, nx per row. The field is taken as zero beyond the last row.
std::vector<double> hilbert_odd_halfplane(const std::vector<double>& v, std::size_t nx, std::size_t ny);

// Central differences in y on the half plane, using evenness of the field
// across y = 0 (d/dy is 0 on the track row).
std::vector<double> ddy_even_halfplane(const std::vector<double>& v, std::size_t nx, std::size_t ny, double dy);

}  // namespace sart
