#include "sart/lr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sart/error.hpp"
#include "sart/fft.hpp"

namespace sart {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t track_row_or_throw(const ImageGrid& g) {
    auto t = g.track_row();
    if (!t) throw ValidationError("image grid must contain the track row y = 0");
    return *t;
}

double eta_of(std::size_t k, const ImageGrid& g) {
    return 2.0 * kPi * static_cast<double>(fft::freq_index(k, g.ny)) / (static_cast<double>(g.ny) * g.dy);
}

bool is_nyquist(std::size_t k, std::size_t n) { return n % 2 == 0 && k == n / 2; }

const Image& find_offset(const EvenImageSet& set, long b) {
    auto it = set.find(b);
    if (it == set.end()) throw ValidationError("even image for offset " + std::to_string(b) + " missing");
    return it->second;
}

// Overwrite eta = 0 and Nyquist with e^{-i a eta} times the spectrum of fe_a.
void fill_special_bins(SpectralField& F, const Image& fe_a, long a_rows) {
    const auto& g = fe_a.grid();
    SpectralField Ea = column_spectrum(fe_a);
    for (std::size_t k = 0; k < g.ny; ++k) {
        if (k != 0 && !is_nyquist(k, g.ny)) continue;
        cplx ph = std::polar(1.0, -eta_of(k, g) * static_cast<double>(a_rows) * g.dy);
        for (std::size_t i = 0; i < g.nx; ++i) F.at(i, k) = ph * Ea.at(i, k);
    }
}

}  // namespace

void AntennaArray::validate() const {
    if (positions.empty() || positions.front() != 0) throw ValidationError("antenna positions must start at 0");
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (positions[i] <= positions[i - 1]) throw ValidationError("antenna positions must be strictly increasing");
}

void RegularizationSpec::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be > 0");
    if (cos_power_k < 1) throw ValidationError("cos power k must be >= 1");
}

Image even_part_rows(const Image& img, long b, Boundary bc) {
    const auto& g = img.grid();
    const auto t = static_cast<long>(track_row_or_throw(g));
    const auto ny = static_cast<long>(g.ny);
    auto read = [&](std::size_t i, long j) {
        if (bc == Boundary::periodic) j = ((j % ny) + ny) % ny;
        else if (j < 0 || j >= ny) return 0.0;
        return img.at(i, static_cast<std::size_t>(j));
    };
    Image out(g);
    for (long j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            out.at(i, static_cast<std::size_t>(j)) = 0.5 * (read(i, j + b) + read(i, 2 * t + b - j));
    return out;
}

Image even_part_about(const Image& img, double b, Boundary bc) {
    double q = b / img.grid().dy;
    double r = std::round(q);
    if (std::abs(q - r) > 1e-9) throw ValidationError("offset must be a multiple of dy");
    return even_part_rows(img, static_cast<long>(r), bc);
}

SpectralField column_spectrum(const Image& img) {
    const auto& g = img.grid();
    std::vector<cplx> buf(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) buf[n] = img.values()[n];
    fft::transform(buf.data(), g.ny, g.nx, g.nx, 1, -1);
    SpectralField s(Axis{g.nx, g.x0, g.dx}, Axis{g.ny, 0.0, 2.0 * kPi / (static_cast<double>(g.ny) * g.dy)});
    for (std::size_t k = 0; k < g.ny; ++k) {
        cplx ph = std::polar(1.0, -eta_of(k, g) * g.y0);
        for (std::size_t i = 0; i < g.nx; ++i) s.at(i, k) = ph * buf[k * g.nx + i];
    }
    return s;
}

Image inverse_column_spectrum(const SpectralField& s, const ImageGrid& g) {
    if (s.xi.n != g.nx || s.second.n != g.ny) throw ValidationError("spectrum does not match grid");
    std::vector<cplx> buf(g.size());
    for (std::size_t k = 0; k < g.ny; ++k) {
        cplx ph = std::polar(1.0, eta_of(k, g) * g.y0);
        for (std::size_t i = 0; i < g.nx; ++i) buf[k * g.nx + i] = ph * s.at(i, k);
    }
    fft::transform(buf.data(), g.ny, g.nx, g.nx, 1, +1);
    std::vector<double> v(g.size());
    const double inv = 1.0 / static_cast<double>(g.ny);
    for (std::size_t n = 0; n < g.size(); ++n) v[n] = buf[n].real() * inv;
    return Image(g, std::move(v));
}

SpectralField sine_modulated_spectrum(const Image& fe_b, const Image& fe_0, long b) {
    const auto& g = fe_b.grid();
    if (!(g == fe_0.grid())) throw ValidationError("even images on different grids");
    const auto ny = static_cast<long>(g.ny);
    Image d(g);
    for (long j = 0; j < ny; ++j) {
        auto js = static_cast<std::size_t>((((j - b) % ny) + ny) % ny);
        for (std::size_t i = 0; i < g.nx; ++i)
            d.at(i, static_cast<std::size_t>(j)) = fe_b.at(i, static_cast<std::size_t>(j)) - fe_0.at(i, js);
    }
    SpectralField s = column_spectrum(d);
    for (auto& v : s.values) v *= cplx(0.0, -1.0);
    return s;
}

Image resolve_two(const Image& fe_0, const Image& fe_b, long b, const RegularizationSpec& reg) {
    reg.validate();
    if (b <= 0) throw ValidationError("resolve_two needs b > 0");
    if (reg.eta0_source != 0 && reg.eta0_source != b) throw ValidationError("eta0 source must be 0 or b");
    const auto& g = fe_0.grid();
    const double bl = static_cast<double>(b) * g.dy;
    SpectralField F = sine_modulated_spectrum(fe_b, fe_0, b);
    for (std::size_t k = 0; k < g.ny; ++k) {
        double eta = eta_of(k, g);
        double s = std::sin(bl * eta), c = std::cos(bl * eta);
        double den = s * s;
        if (std::abs(eta) > kPi / (2.0 * bl)) den += reg.epsilon * std::pow(c * c, reg.cos_power_k);
        double m = den > 0.0 ? s / den : 0.0;
        for (std::size_t i = 0; i < g.nx; ++i) F.at(i, k) *= m;
    }
    fill_special_bins(F, reg.eta0_source == 0 ? fe_0 : fe_b, reg.eta0_source);
    return inverse_column_spectrum(F, g);
}

std::vector<std::pair<long, long>> antenna_pairs(const std::vector<long>& pos, bool all_pairs) {
    std::vector<long> p = pos;
    std::sort(p.begin(), p.end());
    std::vector<std::pair<long, long>> out;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (all_pairs || i == 0) out.emplace_back(p[i], p[j]);
    return out;
}

Image resolve_many(const EvenImageSet& set, const ResolveOptions& opts) {
    if (set.size() < 2) throw ValidationError("resolve_many needs at least two even images");
    std::vector<long> pos;
    for (const auto& [b, img] : set) pos.push_back(b);
    if (pos.front() != 0) throw ValidationError("even image set must contain offset 0");
    const ImageGrid& g = set.begin()->second.grid();
    for (const auto& [b, img] : set)
        if (!(img.grid() == g)) throw ValidationError("even images on different grids");
    auto pairs = antenna_pairs(pos, opts.all_pairs);

    std::vector<double> den(g.ny, 0.0);
    for (auto [pi, pj] : pairs) {
        double d = static_cast<double>(pj - pi) * g.dy;
        for (std::size_t k = 0; k < g.ny; ++k) den[k] += std::pow(std::sin(d * eta_of(k, g)), 2);
    }
    std::vector<std::size_t> bad;
    for (std::size_t k = 1; k < g.ny; ++k)
        if (!is_nyquist(k, g.ny) && den[k] < 1e-14) bad.push_back(k);
    if (!bad.empty()) {
        std::ostringstream os;
        os << "antenna separations share zeros of sin(b eta) at bins";
        for (std::size_t n = 0; n < bad.size() && n < 16; ++n) os << ' ' << fft::freq_index(bad[n], g.ny);
        if (bad.size() > 16) os << " ...";
        throw ValidationError(os.str());
    }

    SpectralField acc(Axis{g.nx, g.x0, g.dx}, Axis{g.ny, 0.0, 2.0 * kPi / (static_cast<double>(g.ny) * g.dy)});
    for (auto [pi, pj] : pairs) {
        SpectralField h = sine_modulated_spectrum(find_offset(set, pj), find_offset(set, pi), pj - pi);
        double d = static_cast<double>(pj - pi) * g.dy;
        for (std::size_t k = 0; k < g.ny; ++k) {
            double eta = eta_of(k, g);
            cplx w = std::sin(d * eta) * std::polar(1.0, -eta * static_cast<double>(pi) * g.dy);
            for (std::size_t i = 0; i < g.nx; ++i) acc.at(i, k) += w * h.at(i, k);
        }
    }
    for (std::size_t k = 0; k < g.ny; ++k) {
        if (k == 0 || is_nyquist(k, g.ny)) continue;
        for (std::size_t i = 0; i < g.nx; ++i) acc.at(i, k) /= den[k];
    }
    fill_special_bins(acc, find_offset(set, opts.eta0_source), opts.eta0_source);
    return inverse_column_spectrum(acc, g);
}

namespace {

// Circular shifts in the resolvers only match the continuum identities
// when the even images vanish near both ends of the y range.
void check_guard(const EvenImageSet& set, long guard) {
    for (const auto& [b, img] : set) {
        const auto& g = img.grid();
        double peak = 0.0, edge = 0.0;
        for (std::size_t j = 0; j < g.ny; ++j) {
            bool near = static_cast<long>(j) < guard || static_cast<long>(g.ny - 1 - j) < guard;
            for (std::size_t i = 0; i < g.nx; ++i) {
                double v = std::abs(img.at(i, j));
                peak = std::max(peak, v);
                if (near) edge = std::max(edge, v);
            }
        }
        if (edge > 1e-12 * std::max(peak, 1e-300))
            throw ValidationError("phantom too close to the y boundary for offset " + std::to_string(b));
    }
}

Image upper_half(const Image& img) {
    const auto& g = img.grid();
    auto t = track_row_or_throw(g);
    ImageGrid h{g.nx, g.ny - t, g.dx, g.dy, g.x0, 0.0};
    std::vector<double> v(img.values().begin() + static_cast<long>(t * g.nx), img.values().end());
    return Image(h, std::move(v));
}

Image even_extend(const Image& half, const ImageGrid& full) {
    Image out(full);
    for (std::size_t j = 0; j < full.ny; ++j) {
        auto q = static_cast<std::size_t>(std::llround(std::abs(full.y(j)) / full.dy));
        if (q >= half.grid().ny) continue;
        for (std::size_t i = 0; i < full.nx; ++i) out.at(i, j) = half.at(i, q);
    }
    return out;
}

}  // namespace

LrResult lr_pipeline(const Image& phantom, const AntennaArray& antennas, const NoiseSpec& noise,
                     const LrConfig& cfg) {
    antennas.validate();
    noise.validate();
    const auto& g = phantom.grid();
    track_row_or_throw(g);
    if (antennas.positions.size() < 2) throw ValidationError("at least two antennas are needed");

    LrResult res;
    for (long p : antennas.positions) res.clean_even.emplace(p, even_part_rows(phantom, p, cfg.boundary));
    check_guard(res.clean_even, antennas.positions.back());

    std::uint64_t id = 0;
    for (long p : antennas.positions) {
        const Image& fe = res.clean_even.at(p);
        if (cfg.mode == LrMode::direct) {
            res.used_even.emplace(p, noise.percent > 0.0 ? add_noise(fe, noise, id) : fe);
        } else {
            Image half = upper_half(fe);
            const auto& hg = half.grid();
            double rmax = std::ceil(std::hypot(hg.x_max() - hg.x0, hg.y_max())) + 1.0;
            DataGrid dg = DataGrid::make(hg.x0, hg.x_max(), rmax, hg.dx, hg.dy);
            std::size_t na = cfg.n_angles ? cfg.n_angles : default_angles(hg);
            DataField data = forward(half, dg, na);
            if (noise.percent > 0.0) data = add_noise(data, noise, id);
            Image rec = invert_fbp(data, hg, cfg.continuation);
            res.used_even.emplace(p, even_extend(rec, g));
        }
        ++id;
    }

    if (cfg.exact) {
        res.resolved = resolve_many(res.used_even, cfg.resolve);
    } else {
        long b = antennas.positions[1];
        res.resolved = resolve_two(res.used_even.at(0), res.used_even.at(b), b, cfg.reg);
    }
    return res;
}

}  // namespace sart
