#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sart {

// Uniform image grid. Sample (i,j) sits at (x0 + i*dx, y0 + j*dy); values are
// stored row-major with x fastest.
struct ImageGrid {
    std::size_t nx = 0, ny = 0;
    double dx = 1.0, dy = 1.0;
    double x0 = 0.0, y0 = 0.0;

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * dy; }
    double x_max() const { return x(nx - 1); }
    double y_max() const { return y(ny - 1); }
    std::size_t size() const { return nx * ny; }

    // Throws ValidationError on a malformed grid, including a y-range that
    // straddles the track without a sample row on it.
    void validate() const;
    // Index of the row at y = 0, if the grid contains the track.
    std::optional<std::size_t> track_row() const;

    bool operator==(const ImageGrid&) const = default;
};

// Track x radius sampling of g(x, r). r_j = j * d_radius.
struct DataGrid {
    std::size_t n_track = 0, n_radius = 0;
    double d_track = 1.0, d_radius = 1.0;
    double track_min = 0.0, track_max = 0.0;
    double radius_max = 0.0;

    static DataGrid make(double track_min, double track_max, double radius_max,
                         double d_track = 1.0, double d_radius = 1.0);

    double z(std::size_t i) const { return track_min + static_cast<double>(i) * d_track; }
    double r(std::size_t j) const { return static_cast<double>(j) * d_radius; }
    std::size_t size() const { return n_track * n_radius; }

    void validate() const;
    bool operator==(const DataGrid&) const = default;
};

class Image {
public:
    Image() = default;
    explicit Image(const ImageGrid& grid);  // zeros
    Image(const ImageGrid& grid, std::vector<double> values);

    const ImageGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(std::size_t i, std::size_t j) const { return values_[j * grid_.nx + i]; }
    double& at(std::size_t i, std::size_t j) { return values_[j * grid_.nx + i]; }

    // Bilinear interpolation; zero outside the grid.
    double sample(double x, double y) const;

    // Throws NumericError if any value is not finite.
    void require_finite(const char* what) const;

private:
    ImageGrid grid_;
    std::vector<double> values_;
};

// Stored with radius fastest: value(i_track, j_radius) at i*n_radius + j.
class DataField {
public:
    DataField() = default;
    explicit DataField(const DataGrid& grid);
    DataField(const DataGrid& grid, std::vector<double> values);

    const DataGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * grid_.n_radius + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * grid_.n_radius + j]; }

    // Bilinear in (z, |r|); zero outside the sampled rectangle.
    double sample(double z, double r) const;

    void require_finite(const char* what) const;

private:
    DataGrid grid_;
    std::vector<double> values_;
};

struct Disc {
    double xc = 0.0, yc = 0.0, radius = 1.0, amplitude = 1.0;
};

// amplitude * exp(-|p - c|^2 / (2 sigma^2)). With mirrored set the blob is
// accompanied by its reflection about y = 0.
struct GaussianBlob {
    double xc = 0.0, yc = 0.0, sigma = 1.0, amplitude = 1.0;
    bool mirrored = false;
};

struct PhantomSpec {
    std::vector<Disc> discs;
    std::vector<GaussianBlob> blobs;

    void validate() const;
    // Point evaluation with the sample-centre rule.
    double value(double x, double y) const;
};

Image render_phantom(const PhantomSpec& spec, const ImageGrid& grid);

struct Profile {
    std::vector<double> coords;
    std::vector<double> values;
};

// Row nearest to row_y.
Profile cross_section(const Image& img, double row_y);
// Column nearest to col_x.
Profile column_section(const Image& img, double col_x);

}  // namespace sart
