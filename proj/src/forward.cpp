#include "sart/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sart/bessel.hpp"
#include "sart/error.hpp"
#include "sart/rng.hpp"

namespace sart {

namespace {

constexpr double kPi = std::numbers::pi;

// Bounding box (physical coordinates, y >= 0 part only) of the nonzero
// samples, widened by one cell for the bilinear footprint.
struct Box {
    bool empty = true;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

Box support_box(const Image& img) {
    const auto& g = img.grid();
    Box b;
    std::size_t imin = g.nx, imax = 0, jmin = g.ny, jmax = 0;
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            if (img.at(i, j) != 0.0) {
                imin = std::min(imin, i);
                imax = std::max(imax, i);
                jmin = std::min(jmin, j);
                jmax = std::max(jmax, j);
            }
    if (imin > imax) return b;
    b.empty = false;
    b.xmin = g.x(imin) - g.dx;
    b.xmax = g.x(imax) + g.dx;
    b.ymin = std::max(0.0, g.y(jmin) - g.dy);
    b.ymax = g.y(jmax) + g.dy;
    if (b.ymax < 0.0) b.empty = true;
    return b;
}

bool circle_misses(const Box& b, double cx, double r) {
    double ex = std::max({b.xmin - cx, 0.0, cx - b.xmax});
    double ey = std::max(b.ymin, 0.0);
    double near = std::hypot(ex, ey);
    double fx = std::max(std::abs(b.xmin - cx), std::abs(b.xmax - cx));
    double far = std::hypot(fx, b.ymax);
    return r < near || r > far;
}

// Measure of [lo, hi] intersected with [0, pi], allowing lo, hi to wrap.
double overlap_upper(double lo, double hi) {
    double total = 0.0;
    for (int k = -1; k <= 1; ++k) {
        double a = std::max(lo + 2.0 * kPi * k, 0.0);
        double c = std::min(hi + 2.0 * kPi * k, kPi);
        if (c > a) total += c - a;
    }
    return total;
}

double disc_mean(const Disc& d, double x, double r) {
    double ex = d.xc - x, ey = d.yc;
    if (r == 0.0) return (x - d.xc) * (x - d.xc) + d.yc * d.yc <= d.radius * d.radius ? d.amplitude : 0.0;
    double D = std::hypot(ex, ey);
    double alpha;
    if (D == 0.0) {
        alpha = r <= d.radius ? kPi : 0.0;
    } else {
        double kappa = (r * r + D * D - d.radius * d.radius) / (2.0 * r * D);
        if (kappa <= -1.0) alpha = kPi;
        else if (kappa >= 1.0) alpha = 0.0;
        else alpha = std::acos(kappa);
    }
    if (alpha == 0.0) return 0.0;
    double phi = std::atan2(ey, ex);
    double arc = alpha >= kPi ? kPi : overlap_upper(phi - alpha, phi + alpha);
    // The lower half circle sees the mirror of the upper one.
    return d.amplitude * arc / kPi;
}

double blob_mean(const GaussianBlob& b, double x, double r) {
    double D = std::hypot(b.xc - x, b.yc);
    double s2 = b.sigma * b.sigma;
    double mean = std::exp(-(r - D) * (r - D) / (2.0 * s2)) * bessel_i0e(r * D / s2);
    return 2.0 * b.amplitude * mean;
}

}  // namespace

std::size_t default_angles(const ImageGrid& grid) { return 4 * std::max(grid.nx, grid.ny); }

DataField forward(const Image& img, const DataGrid& dgrid, std::size_t n_angles) {
    if (n_angles < 8) throw ValidationError("forward needs n_angles >= 8");
    dgrid.validate();
    img.require_finite("forward input");
    const auto& g = img.grid();

    // theta and 2 pi - theta hit the same point of f(x, |y|): fold the rule
    // onto [0, pi] with doubled interior weights.
    std::size_t half = n_angles / 2;
    std::vector<double> ca, sa, wa;
    for (std::size_t m = 0; m <= half; ++m) {
        double th = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(n_angles);
        double w = 1.0;
        if (m != 0 && !(n_angles % 2 == 0 && m == half)) w = 2.0;
        ca.push_back(std::cos(th));
        sa.push_back(std::abs(std::sin(th)));
        wa.push_back(w / static_cast<double>(n_angles));
    }

    DataField out(dgrid);
    Box box = support_box(img);
    if (box.empty) return out;

    const double* v = img.values().data();
    const std::size_t nx = g.nx, ny = g.ny;
    const double mx = static_cast<double>(nx - 1), my = static_cast<double>(ny - 1);
    auto& ov = out.values();

#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < dgrid.n_track; ++i) {
        double x = dgrid.z(i);
        for (std::size_t j = 0; j < dgrid.n_radius; ++j) {
            double r = dgrid.r(j);
            if (circle_misses(box, x, r)) continue;
            double acc = 0.0;
            for (std::size_t m = 0; m < ca.size(); ++m) {
                double fx = (x + r * ca[m] - g.x0) / g.dx;
                double fy = (r * sa[m] - g.y0) / g.dy;
                if (!(fx >= 0.0) || !(fy >= 0.0) || fx > mx || fy > my) continue;
                auto ii = static_cast<std::size_t>(fx);
                auto jj = static_cast<std::size_t>(fy);
                if (ii >= nx - 1) ii = nx - 2;
                if (jj >= ny - 1) jj = ny - 2;
                double tx = fx - static_cast<double>(ii), ty = fy - static_cast<double>(jj);
                const double* p0 = v + jj * nx + ii;
                const double* p1 = p0 + nx;
                double val = (1.0 - ty) * ((1.0 - tx) * p0[0] + tx * p0[1]) + ty * ((1.0 - tx) * p1[0] + tx * p1[1]);
                acc += wa[m] * val;
            }
            ov[i * dgrid.n_radius + j] = acc;
        }
    }
    return out;
}

DataField project_phantom(const PhantomSpec& spec, const DataGrid& dgrid) {
    spec.validate();
    dgrid.validate();
    DataField out(dgrid);
    auto& ov = out.values();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < dgrid.n_track; ++i) {
        double x = dgrid.z(i);
        for (std::size_t j = 0; j < dgrid.n_radius; ++j) {
            double r = dgrid.r(j);
            double acc = 0.0;
            for (const auto& d : spec.discs) acc += disc_mean(d, x, r);
            for (const auto& b : spec.blobs) acc += blob_mean(b, x, r);
            ov[i * dgrid.n_radius + j] = acc;
        }
    }
    return out;
}

void NoiseSpec::validate() const {
    if (!(percent >= 0.0) || !std::isfinite(percent)) throw ValidationError("noise percent must be >= 0");
    if (!(additive_scale >= 0.0) || !std::isfinite(additive_scale))
        throw ValidationError("noise additive_scale must be >= 0");
}

namespace {

void noise_values(std::vector<double>& v, std::size_t n_fast, const NoiseSpec& spec, std::uint64_t field_id) {
    if (spec.percent == 0.0) return;
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    double add = spec.percent * spec.additive_scale * amax;
    std::size_t n_slow = v.size() / n_fast;
#pragma omp parallel for schedule(static)
    for (std::size_t a = 0; a < n_slow; ++a)
        for (std::size_t b = 0; b < n_fast; ++b) {
            double& x = v[a * n_fast + b];
            double n1 = standard_normal(spec.seed, field_id, a, b, 0);
            double n2 = standard_normal(spec.seed, field_id, a, b, 1);
            x = x * (1.0 + spec.percent * n1) + add * n2;
        }
}

}  // namespace

DataField add_noise(const DataField& data, const NoiseSpec& spec, std::uint64_t field_id) {
    spec.validate();
    std::vector<double> v = data.values();
    noise_values(v, data.grid().n_radius, spec, field_id);
    return DataField(data.grid(), std::move(v));
}

Image add_noise(const Image& img, const NoiseSpec& spec, std::uint64_t field_id) {
    spec.validate();
    std::vector<double> v = img.values();
    noise_values(v, img.grid().nx, spec, field_id);
    return Image(img.grid(), std::move(v));
}

}  // namespace sart
