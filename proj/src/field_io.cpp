#include "sart/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

#include "sart/error.hpp"

namespace sart {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "payload writer assumes a little-endian host");

struct Header {
    std::string kind;
    std::vector<std::size_t> shape;
    std::vector<double> spacing, origin;
    Meta meta;
};

std::string tmp_name(const std::string& path) { return path + ".tmp" + std::to_string(::getpid()); }

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

void write_pair(const std::string& path, const Header& h, const double* data, std::size_t count) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::string tp = tmp_name(path), th = tmp_name(path + ".hdr");
    {
        std::ofstream out(tp, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + path);
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
        if (!out) throw ValidationError("short write to " + path);
    }
    {
        std::ofstream out(th);
        if (!out) throw ValidationError("cannot write " + path + ".hdr");
        out << "ndim " << h.shape.size() << "\n";
        out << "shape " << join(h.shape) << "\n";
        out << "spacing " << join(h.spacing) << "\n";
        out << "origin " << join(h.origin) << "\n";
        out << "kind " << h.kind << "\n";
        for (const auto& [k, v] : h.meta) out << "meta." << k << " " << v << "\n";
    }
    fs::rename(tp, path);
    fs::rename(th, path + ".hdr");
}

Header read_header(const std::string& path) {
    std::ifstream in(path + ".hdr");
    if (!in) throw ValidationError("missing header " + path + ".hdr");
    Header h;
    std::string line;
    std::size_t ndim = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto sp = line.find(' ');
        std::string key = line.substr(0, sp);
        std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
        std::istringstream is(rest);
        if (key == "ndim") is >> ndim;
        else if (key == "shape") { std::size_t v; while (is >> v) h.shape.push_back(v); }
        else if (key == "spacing") { double v; while (is >> v) h.spacing.push_back(v); }
        else if (key == "origin") { double v; while (is >> v) h.origin.push_back(v); }
        else if (key == "kind") is >> h.kind;
        else if (key.rfind("meta.", 0) == 0) h.meta[key.substr(5)] = rest;
    }
    if (h.shape.size() != ndim || ndim < 2 || h.spacing.size() < 2 || h.origin.size() < 2)
        throw ValidationError("malformed header " + path + ".hdr");
    return h;
}

std::vector<double> read_payload(const std::string& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw ValidationError("payload of " + path + " is shorter than its header says");
    return v;
}

void write_pgm_values(const std::string& path, const std::vector<double>& v, std::size_t w, std::size_t h,
                      bool flip) {
    double lo = 0.0, hi = 0.0;
    if (!v.empty()) {
        auto [a, b] = std::minmax_element(v.begin(), v.end());
        lo = *a;
        hi = *b;
    }
    double span = hi > lo ? hi - lo : 1.0;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "P5\n# scale min " << std::setprecision(17) << lo << " max " << hi << "\n" << w << " " << h
        << "\n65535\n";
    std::vector<unsigned char> buf(2 * w);
    for (std::size_t rr = 0; rr < h; ++rr) {
        std::size_t row = flip ? h - 1 - rr : rr;
        for (std::size_t c = 0; c < w; ++c) {
            double t = (v[row * w + c] - lo) / span;
            auto q = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
            buf[2 * c] = static_cast<unsigned char>(q >> 8);
            buf[2 * c + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
}

}  // namespace

void write_image(const std::string& path, const Image& img, const Meta& meta) {
    const auto& g = img.grid();
    Header h{"image", {g.ny, g.nx}, {g.dy, g.dx}, {g.y0, g.x0}, meta};
    write_pair(path, h, img.values().data(), img.values().size());
}

void write_data(const std::string& path, const DataField& data, const Meta& meta) {
    const auto& g = data.grid();
    Header h{"data", {g.n_track, g.n_radius}, {g.d_track, g.d_radius}, {g.track_min, 0.0}, meta};
    write_pair(path, h, data.values().data(), data.values().size());
}

void write_spectrum(const std::string& path, const SpectralField& s, const Meta& meta) {
    Header h{"spectrum", {s.xi.n, s.second.n, 2}, {s.xi.step, s.second.step, 1.0}, {s.xi.start, s.second.start, 0.0},
             meta};
    write_pair(path, h, reinterpret_cast<const double*>(s.values.data()), 2 * s.values.size());
}

std::string read_kind(const std::string& path) { return read_header(path).kind; }

Image read_image(const std::string& path, Meta* meta) {
    Header h = read_header(path);
    if (h.kind != "image" || h.shape.size() != 2) throw ValidationError(path + " is not an image");
    ImageGrid g{h.shape[1], h.shape[0], h.spacing[1], h.spacing[0], h.origin[1], h.origin[0]};
    if (meta) *meta = h.meta;
    return Image(g, read_payload(path, g.size()));
}

DataField read_data(const std::string& path, Meta* meta) {
    Header h = read_header(path);
    if (h.kind != "data" || h.shape.size() != 2) throw ValidationError(path + " is not a data field");
    DataGrid g;
    g.n_track = h.shape[0];
    g.n_radius = h.shape[1];
    g.d_track = h.spacing[0];
    g.d_radius = h.spacing[1];
    g.track_min = h.origin[0];
    g.track_max = g.track_min + static_cast<double>(g.n_track - 1) * g.d_track;
    g.radius_max = static_cast<double>(g.n_radius - 1) * g.d_radius;
    if (meta) *meta = h.meta;
    return DataField(g, read_payload(path, g.size()));
}

SpectralField read_spectrum(const std::string& path, Meta* meta) {
    Header h = read_header(path);
    if (h.kind != "spectrum" || h.shape.size() != 3 || h.shape[2] != 2)
        throw ValidationError(path + " is not a spectrum");
    SpectralField s(Axis{h.shape[0], h.origin[0], h.spacing[0]}, Axis{h.shape[1], h.origin[1], h.spacing[1]});
    auto raw = read_payload(path, 2 * s.values.size());
    for (std::size_t n = 0; n < s.values.size(); ++n) s.values[n] = cplx(raw[2 * n], raw[2 * n + 1]);
    if (meta) *meta = h.meta;
    return s;
}

void write_pgm(const std::string& path, const Image& img) {
    write_pgm_values(path, img.values(), img.grid().nx, img.grid().ny, true);
}

void write_pgm(const std::string& path, const DataField& data) {
    // Track along the horizontal axis, radius growing upwards.
    const auto& g = data.grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.n_track; ++i)
        for (std::size_t j = 0; j < g.n_radius; ++j) v[j * g.n_track + i] = data.at(i, j);
    write_pgm_values(path, v, g.n_track, g.n_radius, true);
}

void write_profile_csv(const std::string& path, const Profile& p, const std::string& axis) {
    fs::path fp(path);
    if (fp.has_parent_path()) fs::create_directories(fp.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << axis << ",value\n" << std::setprecision(12);
    for (std::size_t i = 0; i < p.coords.size(); ++i) out << p.coords[i] << "," << p.values[i] << "\n";
}

}  // namespace sart
