#pragma once

#include <cstdint>

#include "sart/grid.hpp"

namespace sart {

// Circle means g(x, r) of f(x, |y|) by a uniform angular rule with bilinear
// image interpolation. n_angles >= 8.
DataField forward(const Image& img, const DataGrid& dgrid, std::size_t n_angles);

// 4 * max(nx, ny).
std::size_t default_angles(const ImageGrid& grid);

// Closed-form circle means of a phantom: arc fractions for discs, the
// I0 formula for blobs. Blobs are treated as if they had no mass below the
// track (exact for mirrored blobs).
DataField project_phantom(const PhantomSpec& spec, const DataGrid& dgrid);

struct NoiseSpec {
    double percent = 0.0;
    double additive_scale = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

// out = g (1 + p N1) + p * additive_scale * max|g| * N2. field_id selects an
// independent stream, so two pictures noised with the same seed but
// different ids are uncorrelated.
DataField add_noise(const DataField& data, const NoiseSpec& spec, std::uint64_t field_id = 0);
Image add_noise(const Image& img, const NoiseSpec& spec, std::uint64_t field_id = 0);

}  // namespace sart
