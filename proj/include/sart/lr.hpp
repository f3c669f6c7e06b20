#pragma once

#include <map>
#include <string>
#include <vector>

#include "sart/fbp.hpp"
#include "sart/forward.hpp"
#include "sart/grid.hpp"
#include "sart/spectral.hpp"

namespace sart {

// Track offsets in units of dy, first entry 0, strictly increasing.
struct AntennaArray {
    std::vector<long> positions;
    void validate() const;
};

// offset (rows) -> even image about that offset.
using EvenImageSet = std::map<long, Image>;

struct RegularizationSpec {
    double epsilon = 1e-2;
    int cos_power_k = 2;
    long eta0_source = 0;  // offset whose even image supplies eta = 0
    void validate() const;
};

// How reads outside the grid are treated by the even projector.
enum class Boundary { zero, periodic };

// out(x, y) = 1/2 [f(x, y + b) + f(x, b - y)], b in units of dy (rows). The
// result lives on the input grid, so each image is symmetric about y = 0 in
// its own (track-centred) coordinate. The grid must contain y = 0.
Image even_part_rows(const Image& img, long b_rows, Boundary bc = Boundary::zero);
// Same with b in length units; throws unless b is a multiple of dy.
Image even_part_about(const Image& img, double b, Boundary bc = Boundary::zero);

// Per-column DFT in y (phase referenced to y = 0), eta axis in FFT order.
SpectralField column_spectrum(const Image& img);
Image inverse_column_spectrum(const SpectralField& s, const ImageGrid& grid);

// h_b = (1/i) DFT_y[fe_b(x, y) - fe_0(x, y - b)] with a circular shift.
// Equals sin(b eta) times the spectrum of f.
SpectralField sine_modulated_spectrum(const Image& fe_b, const Image& fe_0, long b_rows);

// Regularised two-set formula. eta = 0 and the Nyquist bin come from the
// even image at reg.eta0_source (0 or b).
Image resolve_two(const Image& fe_0, const Image& fe_b, long b_rows, const RegularizationSpec& reg);

struct ResolveOptions {
    // All pairwise separations or only those against the reference antenna.
    bool all_pairs = true;
    long eta0_source = 0;
};

// Exact m-set formula. Throws ValidationError naming the bins where every
// sin(b_k eta) vanishes (eta = 0 and Nyquist excepted).
Image resolve_many(const EvenImageSet& set, const ResolveOptions& opts = {});

// Separations used by resolve_many: (p_i, p_j) with p_i < p_j.
std::vector<std::pair<long, long>> antenna_pairs(const std::vector<long>& positions, bool all_pairs);

enum class LrMode { direct, via_radon };

struct LrConfig {
    LrMode mode = LrMode::direct;
    bool exact = true;  // resolve_many; false = resolve_two on the first pair
    RegularizationSpec reg;
    ResolveOptions resolve;
    Boundary boundary = Boundary::zero;
    // via_radon only
    ContinuationMode continuation = ContinuationMode::approximate;
    std::size_t n_angles = 0;  // 0 = default_angles
};

struct LrResult {
    Image resolved;
    EvenImageSet clean_even;   // before noise / reconstruction
    EvenImageSet used_even;    // as handed to the resolver
};

LrResult lr_pipeline(const Image& phantom, const AntennaArray& antennas, const NoiseSpec& noise,
                     const LrConfig& cfg);

}  // namespace sart
