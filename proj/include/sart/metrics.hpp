#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sart/grid.hpp"

namespace sart {

enum class MetricKind { l2_relative, linf, mirror_suppression_ratio, plateau_amplitude };

MetricKind parse_metric(const std::string& name);
std::string metric_name(MetricKind k);

struct CompareOptions {
    // Pixels taking part (same layout as the image); empty = all.
    std::vector<unsigned char> mask;
    // mirror_suppression_ratio: max |a| over `mirror` / max |a| over `region`.
    // plateau_amplitude: mean of a over `region` shrunk by `erosion` pixels.
    std::optional<Disc> region;
    std::optional<Disc> mirror;
    double erosion = 3.0;
};

// l2_relative = |a - b| / |b|, linf = max |a - b|. The region metrics only
// look at a; b is still required to share its grid.
double compare(const Image& a, const Image& b, MetricKind kind, const CompareOptions& opts = {});

double l2_relative(const Image& a, const Image& ref, const std::vector<unsigned char>& mask = {});
double linf(const Image& a, const Image& b, const std::vector<unsigned char>& mask = {});
double mirror_suppression_ratio(const Image& a, const Disc& region, const Disc& mirror);
double plateau_amplitude(const Image& a, const Disc& region, double erosion = 3.0);
double mean_abs_error(const Image& a, const Image& b, const std::vector<unsigned char>& mask = {});

// Radius of the minimum of a along rays from (cx, cy) at the given angles
// (radians), searched over [r_lo, r_hi] in steps of `step`; median over rays
// that stay inside the grid.
double ring_min_radius(const Image& a, double cx, double cy, const std::vector<double>& angles, double r_lo,
                       double r_hi, double step = 0.25);

// Mask of pixels inside a disc (radius in length units).
std::vector<unsigned char> disc_mask(const ImageGrid& g, const Disc& d);

}  // namespace sart
