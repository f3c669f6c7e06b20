#pragma once

#include <cstddef>
#include <vector>

#include "sart/grid.hpp"

namespace sart {

enum class GhostFamily { range, even, odd };

struct GhostParams {
    GhostFamily family = GhostFamily::range;
    double a = 0.0;     // track position (range) or Hankel parameter (even, odd)
    double b = 0.0;     // radial frequency, range only
    std::size_t l = 0;  // radial index, even and odd only
    double L = 1.0, R = 1.0;

    void validate() const;
};

// Data-domain family member at (x, r). The range family's delta in x is
// reported as its radial factor when x == a and 0 otherwise.
double eval_ghost_data(const GhostParams& p, double x, double r);

// Family member sampled on a data grid; the range delta becomes a
// 1/d_track spike on the track sample nearest to a.
DataField ghost_data_field(const GhostParams& p, const DataGrid& dgrid);

// Parameter sampling for the outside projections.
struct GhostParamGrid {
    // range: b_k = k * b_max / (n_b - 1)
    double b_max = 0.0;
    std::size_t n_b = 0;
    // even / odd: a_k = k * a_max / (n_a - 1), l <= l_max
    double a_max = 0.0;
    std::size_t n_a = 0;
    std::size_t l_max = 0;
    // Midpoint nodes in the substituted variable, 0 = automatic.
    std::size_t n_sub = 0;
};

struct GhostTable {
    GhostFamily family = GhostFamily::range;
    double L = 1.0, R = 1.0;
    GhostParamGrid params;
    // range: per track sample (track_pos) x n_b
    std::vector<double> track_pos;
    // even/odd: (l_max + 1) x n_a, a fastest. For the even/odd projections
    // both tables are filled: `values` for the family, `odd_values` for the
    // odd part when family == even and keep_odd was requested.
    std::vector<double> values;
    std::vector<double> odd_values;
};

// Coefficients of g outside the measured region: r > R for the range
// family, |x| > L for the even and odd families. With family == even and
// both_parities set, the odd coefficients are computed too so that
// recover_outside returns the full field.
GhostTable project_unmeasured(const DataField& g_full, GhostFamily family, double L, double R,
                              const GhostParamGrid& grid, bool both_parities = false);

// Resynthesis on the unmeasured region of dgrid; zero elsewhere.
DataField recover_outside(const GhostTable& table, const DataGrid& dgrid);

struct GhostImageOptions {
    // Rows computed before the Hilbert step, as a multiple of the larger
    // of the image height and R (range family; even/odd stop at their support).
    double y_extension = 4.0;
    // The closed forms are distributions; they are rendered convolved with a
    // planar Gaussian of this width in pixels. A radial kernel only blurs the
    // data in r at fixed track position, so the null-space property survives
    // up to a few widths from the region boundary.
    double smooth_px = 1.0;
    // Range family: the Hilbert integral is carried out to far_extent * R.
    double far_extent = 200.0;
};

// c1 H_y d/dy of the family's pre-image field (the inversion formula applied
// to the family member); the odd image is x times the even-form field. With
// subtract_baseline the b = 0 (range) or l = 0 (even, odd) member is
// subtracted before rendering.
Image ghost_image(const GhostParams& p, bool subtract_baseline, const ImageGrid& igrid,
                  const GhostImageOptions& opts = {});

}  // namespace sart
