#include "sart/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sart/error.hpp"

namespace sart {

namespace {

bool is_whole(double v, double tol = 1e-9) { return std::abs(v - std::round(v)) < tol; }

}  // namespace

void ImageGrid::validate() const {
    if (nx < 2 || ny < 2) throw ValidationError("image grid needs nx, ny >= 2");
    if (!(dx > 0.0) || !(dy > 0.0)) throw ValidationError("image grid spacing must be positive");
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw ValidationError("image grid origin not finite");
    if (y0 <= 0.0 && y_max() >= 0.0 && !is_whole(-y0 / dy))
        throw ValidationError("track y = 0 falls between image rows");
}

std::optional<std::size_t> ImageGrid::track_row() const {
    if (y0 > 0.0 || y_max() < 0.0) return std::nullopt;
    double j = -y0 / dy;
    if (!is_whole(j)) return std::nullopt;
    return static_cast<std::size_t>(std::llround(j));
}

DataGrid DataGrid::make(double track_min, double track_max, double radius_max, double d_track,
                        double d_radius) {
    if (!(d_track > 0.0) || !(d_radius > 0.0)) throw ValidationError("data grid spacing must be positive");
    double nt = (track_max - track_min) / d_track;
    double nr = radius_max / d_radius;
    if (!is_whole(nt, 1e-6) || !is_whole(nr, 1e-6))
        throw ValidationError("data grid bounds must be whole multiples of the spacing");
    DataGrid g;
    g.n_track = static_cast<std::size_t>(std::llround(nt)) + 1;
    g.n_radius = static_cast<std::size_t>(std::llround(nr)) + 1;
    g.d_track = d_track;
    g.d_radius = d_radius;
    g.track_min = track_min;
    g.track_max = track_max;
    g.radius_max = radius_max;
    g.validate();
    return g;
}

void DataGrid::validate() const {
    if (n_track < 2 || n_radius < 2) throw ValidationError("data grid needs at least 2x2 samples");
    if (!(d_track > 0.0) || !(d_radius > 0.0)) throw ValidationError("data grid spacing must be positive");
    if (!(track_min < track_max)) throw ValidationError("data grid needs track_min < track_max");
    double span = static_cast<double>(n_track - 1) * d_track;
    if (std::abs(span - (track_max - track_min)) > 1e-9 * std::max(1.0, span))
        throw ValidationError("data grid track span inconsistent with n_track * d_track");
    double rmax = static_cast<double>(n_radius - 1) * d_radius;
    if (std::abs(rmax - radius_max) > 1e-9 * std::max(1.0, rmax))
        throw ValidationError("data grid radius_max inconsistent with n_radius * d_radius");
}

Image::Image(const ImageGrid& grid) : grid_(grid) {
    grid_.validate();
    values_.assign(grid_.size(), 0.0);
}

Image::Image(const ImageGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) {
        std::ostringstream os;
        os << "image has " << values_.size() << " values, grid needs " << grid_.size();
        throw ValidationError(os.str());
    }
    require_finite("image");
}

double Image::sample(double x, double y) const {
    double fx = (x - grid_.x0) / grid_.dx;
    double fy = (y - grid_.y0) / grid_.dy;
    if (!(fx >= 0.0) || !(fy >= 0.0)) return 0.0;
    double mx = static_cast<double>(grid_.nx - 1), my = static_cast<double>(grid_.ny - 1);
    if (fx > mx || fy > my) return 0.0;
    auto i = static_cast<std::size_t>(fx);
    auto j = static_cast<std::size_t>(fy);
    if (i >= grid_.nx - 1) i = grid_.nx - 2;
    if (j >= grid_.ny - 1) j = grid_.ny - 2;
    double tx = fx - static_cast<double>(i), ty = fy - static_cast<double>(j);
    const double* row0 = values_.data() + j * grid_.nx + i;
    const double* row1 = row0 + grid_.nx;
    return (1.0 - ty) * ((1.0 - tx) * row0[0] + tx * row0[1]) + ty * ((1.0 - tx) * row1[0] + tx * row1[1]);
}

void Image::require_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw NumericError(std::string(what) + " contains non-finite values");
}

DataField::DataField(const DataGrid& grid) : grid_(grid) {
    grid_.validate();
    values_.assign(grid_.size(), 0.0);
}

DataField::DataField(const DataGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) {
        std::ostringstream os;
        os << "data field has " << values_.size() << " values, grid needs " << grid_.size();
        throw ValidationError(os.str());
    }
    require_finite("data field");
}

double DataField::sample(double z, double r) const {
    r = std::abs(r);
    double fz = (z - grid_.track_min) / grid_.d_track;
    double fr = r / grid_.d_radius;
    double mz = static_cast<double>(grid_.n_track - 1), mr = static_cast<double>(grid_.n_radius - 1);
    if (!(fz >= 0.0) || fz > mz || fr > mr) return 0.0;
    auto i = static_cast<std::size_t>(fz);
    auto j = static_cast<std::size_t>(fr);
    if (i >= grid_.n_track - 1) i = grid_.n_track - 2;
    if (j >= grid_.n_radius - 1) j = grid_.n_radius - 2;
    double tz = fz - static_cast<double>(i), tr = fr - static_cast<double>(j);
    const double* a = values_.data() + i * grid_.n_radius + j;
    const double* b = a + grid_.n_radius;
    return (1.0 - tz) * ((1.0 - tr) * a[0] + tr * a[1]) + tz * ((1.0 - tr) * b[0] + tr * b[1]);
}

void DataField::require_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v)) throw NumericError(std::string(what) + " contains non-finite values");
}

void PhantomSpec::validate() const {
    for (const auto& d : discs) {
        if (!(d.radius > 0.0)) throw ValidationError("disc radius must be positive");
        if (!std::isfinite(d.amplitude) || !std::isfinite(d.xc) || !std::isfinite(d.yc))
            throw ValidationError("disc parameters must be finite");
    }
    for (const auto& b : blobs) {
        if (!(b.sigma > 0.0)) throw ValidationError("blob sigma must be positive");
        if (!std::isfinite(b.amplitude) || !std::isfinite(b.xc) || !std::isfinite(b.yc))
            throw ValidationError("blob parameters must be finite");
    }
}

double PhantomSpec::value(double x, double y) const {
    double v = 0.0;
    for (const auto& d : discs) {
        double ex = x - d.xc, ey = y - d.yc;
        if (ex * ex + ey * ey <= d.radius * d.radius) v += d.amplitude;
    }
    for (const auto& b : blobs) {
        double s2 = 2.0 * b.sigma * b.sigma;
        double ex = x - b.xc, ey = y - b.yc;
        v += b.amplitude * std::exp(-(ex * ex + ey * ey) / s2);
        if (b.mirrored) {
            double my = y + b.yc;
            v += b.amplitude * std::exp(-(ex * ex + my * my) / s2);
        }
    }
    return v;
}

Image render_phantom(const PhantomSpec& spec, const ImageGrid& grid) {
    spec.validate();
    grid.validate();
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i) v[j * grid.nx + i] = spec.value(grid.x(i), grid.y(j));
    return Image(grid, std::move(v));
}

Profile cross_section(const Image& img, double row_y) {
    const auto& g = img.grid();
    double half = 0.5 * g.dy;
    if (!(row_y >= g.y0 - half && row_y <= g.y_max() + half))
        throw ValidationError("cross_section row outside the image");
    auto j = static_cast<std::size_t>(std::llround(std::clamp((row_y - g.y0) / g.dy, 0.0, double(g.ny - 1))));
    Profile p;
    p.coords.resize(g.nx);
    p.values.resize(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) {
        p.coords[i] = g.x(i);
        p.values[i] = img.at(i, j);
    }
    return p;
}

Profile column_section(const Image& img, double col_x) {
    const auto& g = img.grid();
    double half = 0.5 * g.dx;
    if (!(col_x >= g.x0 - half && col_x <= g.x_max() + half))
        throw ValidationError("column_section column outside the image");
    auto i = static_cast<std::size_t>(std::llround(std::clamp((col_x - g.x0) / g.dx, 0.0, double(g.nx - 1))));
    Profile p;
    p.coords.resize(g.ny);
    p.values.resize(g.ny);
    for (std::size_t j = 0; j < g.ny; ++j) {
        p.coords[j] = g.y(j);
        p.values[j] = img.at(i, j);
    }
    return p;
}

}  // namespace sart
