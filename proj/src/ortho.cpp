#include "sart/ortho.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "sart/error.hpp"
#include "sart/fbp.hpp"
#include "sart/field_io.hpp"
#include "sart/subst.hpp"

namespace sart {

namespace {

constexpr double kPi = std::numbers::pi;

void check_region(double L, double R) {
    if (!(L > 0.0) || !(R > 0.0)) throw ValidationError("basis region needs L > 0 and R > 0");
}

// 1/sqrt factor pair used by both families: cos(n pi s / S) / s with
// s = sqrt(S^2 - u^2).
inline double cos_over_root(std::size_t n, double u, double S) {
    double s2 = S * S - u * u;
    if (!(s2 > 0.0)) return 0.0;
    double s = std::sqrt(s2);
    return std::cos(static_cast<double>(n) * kPi * s / S) / s;
}

}  // namespace

CoeffTable::CoeffTable(std::size_t kmax, std::size_t lmax, double L_, double R_)
    : k_max(kmax), l_max(lmax), L(L_), R(R_), even((kmax + 1) * (lmax + 1), 0.0), odd((kmax + 1) * (lmax + 1), 0.0) {}

double eval_basis(const BasisIndex& idx, double x, double r, double L, double R) {
    if (!(x > 0.0 && x < L && r > 0.0 && r < R)) return 0.0;
    double v = cos_over_root(idx.k, x, L) * cos_over_root(idx.l, r, R);
    return idx.parity == Parity::odd ? x * v : v;
}

double eval_basis_signed(const BasisIndex& idx, double x, double r, double L, double R) {
    double ax = std::abs(x);
    if (!(ax < L && r >= 0.0 && r < R)) return 0.0;
    double v = cos_over_root(idx.k, ax, L) * cos_over_root(idx.l, r, R);
    return idx.parity == Parity::odd ? x * v : v;
}

double basis_gram(const BasisIndex& a, const BasisIndex& b, double L, double R, std::size_t n_nodes) {
    if (a.parity != b.parity) throw ValidationError("basis_gram needs equal parities");
    check_region(L, R);
    if (n_nodes < 1) throw ValidationError("basis_gram needs nodes");
    // Weight and functions factor into track and radius parts; each part is
    // integrated in its substituted variable with Jacobian u''/u.
    double hx = L / static_cast<double>(n_nodes), hr = R / static_cast<double>(n_nodes);
    double ix = 0.0, ir = 0.0;
    for (std::size_t m = 0; m < n_nodes; ++m) {
        double xs = (static_cast<double>(m) + 0.5) * hx;  // sqrt(L^2 - x^2)
        double x = std::sqrt(L * L - xs * xs);
        double fa = cos_over_root(a.k, x, L), fb = cos_over_root(b.k, x, L);
        double jac = xs / x;
        if (a.parity == Parity::even) ix += x * xs * fa * fb * jac;
        else ix += (xs / x) * (x * fa) * (x * fb) * jac;

        double rs = (static_cast<double>(m) + 0.5) * hr;
        double r = std::sqrt(R * R - rs * rs);
        ir += r * rs * cos_over_root(a.l, r, R) * cos_over_root(b.l, r, R) * (rs / r);
    }
    return ix * hx * ir * hr;
}

CoeffTable project_data(const DataField& data, std::size_t k_max, std::size_t l_max, double L, double R,
                        const ProjectionOptions& opts) {
    check_region(L, R);
    const auto& g = data.grid();
    const double slack = 1e-9 * std::max(L, R);
    if (-g.track_min < L - g.d_track - slack || g.track_max < L - g.d_track - slack ||
        g.radius_max < R - g.d_radius - slack)
        throw ValidationError("data does not cover (-L, L) x (0, R)");

    std::vector<double> xs, rs;
    for (std::size_t i = 0; i < g.n_track; ++i) {
        double x = g.z(i);
        if (x >= -slack && x < L - slack) xs.push_back(std::max(x, 0.0));
    }
    std::vector<std::size_t> rj;
    for (std::size_t j = 0; j < g.n_radius; ++j)
        if (g.r(j) < R - slack) rj.push_back(j);
    if (xs.size() < 2 || rj.size() < 2) throw ValidationError("too few data samples inside the basis region");

    std::size_t nx = opts.nodes_x ? opts.nodes_x : std::max(2 * xs.size(), 2 * k_max + 2);
    std::size_t nr = opts.nodes_r ? opts.nodes_r : std::max(2 * rj.size(), 2 * l_max + 2);
    std::vector<double> qx = midpoints(L, nx), qr = midpoints(R, nr);

    std::vector<double> rsub(rj.size());
    for (std::size_t a = 0; a < rj.size(); ++a) {
        double r = g.r(rj[a]);
        rsub[a] = std::sqrt(R * R - r * r);
    }

    CoeffTable out(k_max, l_max, L, R);
    Eigen::MatrixXd Cx(k_max + 1, nx), Cr(l_max + 1, nr);
    for (std::size_t k = 0; k <= k_max; ++k)
        for (std::size_t n = 0; n < nx; ++n) Cx(k, n) = std::cos(static_cast<double>(k) * kPi * qx[n] / L);
    for (std::size_t l = 0; l <= l_max; ++l)
        for (std::size_t m = 0; m < nr; ++m) Cr(l, m) = std::cos(static_cast<double>(l) * kPi * qr[m] / R);

    for (Parity par : {Parity::even, Parity::odd}) {
        // Regularised integrand on the data columns, resampled in r''.
        std::vector<double> xsub;
        std::vector<std::vector<double>> cols;
        for (double x : xs) {
            if (par == Parity::odd && x <= 0.0) continue;
            double xq = std::sqrt(L * L - x * x);
            std::vector<double> u(rj.size());
            for (std::size_t a = 0; a < rj.size(); ++a) {
                double r = g.r(rj[a]);
                double gp = data.sample(x, r), gm = data.sample(-x, r);
                u[a] = par == Parity::even ? xq * rsub[a] * (gp + gm) : rsub[a] * (xq / x) * (gp - gm);
            }
            xsub.push_back(xq);
            cols.push_back(lagrange4_many(rsub, u, qr));
        }
        if (xsub.size() < 2) throw ValidationError("too few track samples inside the basis region");
        Eigen::MatrixXd W(nx, nr);
        std::vector<double> line(xsub.size());
        for (std::size_t m = 0; m < nr; ++m) {
            for (std::size_t c = 0; c < xsub.size(); ++c) line[c] = cols[c][m];
            auto res = lagrange4_many(xsub, line, qx);
            for (std::size_t n = 0; n < nx; ++n) W(n, m) = res[n];
        }
        Eigen::MatrixXd G = Cx * W * Cr.transpose();
        double h = (L / static_cast<double>(nx)) * (R / static_cast<double>(nr));
        for (std::size_t k = 0; k <= k_max; ++k)
            for (std::size_t l = 0; l <= l_max; ++l)
                out.at(par, k, l) = neumann(k) * neumann(l) / (2.0 * L * R) * h * G(k, l);
    }
    return out;
}

DataField resynthesize(const CoeffTable& c, const DataGrid& dgrid) {
    dgrid.validate();
    const double L = c.L, R = c.R;
    std::vector<std::size_t> ii, jj;
    for (std::size_t i = 0; i < dgrid.n_track; ++i)
        if (std::abs(dgrid.z(i)) < L - 0.5 * dgrid.d_track) ii.push_back(i);
    for (std::size_t j = 0; j < dgrid.n_radius; ++j)
        if (dgrid.r(j) < R - 0.5 * dgrid.d_radius) jj.push_back(j);
    DataField out(dgrid);
    if (ii.empty() || jj.empty()) return out;

    Eigen::MatrixXd Cx(ii.size(), c.k_max + 1), Cr(jj.size(), c.l_max + 1);
    for (std::size_t a = 0; a < ii.size(); ++a)
        for (std::size_t k = 0; k <= c.k_max; ++k) Cx(a, k) = cos_over_root(k, std::abs(dgrid.z(ii[a])), L);
    for (std::size_t b = 0; b < jj.size(); ++b)
        for (std::size_t l = 0; l <= c.l_max; ++l) Cr(b, l) = cos_over_root(l, dgrid.r(jj[b]), R);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Ge(
        c.even.data(), c.k_max + 1, c.l_max + 1),
        Go(c.odd.data(), c.k_max + 1, c.l_max + 1);
    Eigen::MatrixXd E = Cx * Ge * Cr.transpose();
    Eigen::MatrixXd O = Cx * Go * Cr.transpose();
    for (std::size_t a = 0; a < ii.size(); ++a) {
        double x = dgrid.z(ii[a]);
        for (std::size_t b = 0; b < jj.size(); ++b) out.at(ii[a], jj[b]) = E(a, b) + x * O(a, b);
    }
    out.require_finite("resynthesis");
    return out;
}

Image basis_reconstruction(const BasisIndex& idx, const ImageGrid& igrid, double L, double R,
                           const BasisOptions& opts) {
    check_region(L, R);
    igrid.validate();
    if (!igrid.track_row() && igrid.y0 <= 0.0) throw ValidationError("image rows must be aligned with the track");
    const double dy = igrid.dy;
    const double ymax = std::max(std::abs(igrid.y0), std::abs(igrid.y_max()));
    const auto ny = static_cast<std::size_t>(std::ceil(std::max(ymax, R) / dy)) + 2;
    const std::size_t nx = igrid.nx;
    const bool odd = idx.parity == Parity::odd;
    const std::size_t n0 = 16 + 2 * (idx.k + idx.l);

    std::vector<double> P(nx * ny, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t q = 0; q < ny; ++q) {
        const double y = static_cast<double>(q) * dy;
        const double s2 = R * R - y * y;
        if (!(s2 > 0.0)) continue;
        const double s = std::sqrt(s2);
        for (std::size_t p = 0; p < nx; ++p) {
            const double x = igrid.x(p);
            double lo = std::max(-L, x - s), hi = std::min(L, x + s);
            if (!(hi > lo)) continue;
            auto f = [&](double t) {
                double a = cos_over_root(idx.k, t, L);
                double u = x - t;
                double w = R * R - u * u - y * y;
                if (!(w > 0.0)) return 0.0;
                double sw = std::sqrt(w);
                return a * std::cos(static_cast<double>(idx.l) * kPi * sw / R) / sw;
            };
            P[q * nx + p] = endpoint_integral(f, lo, hi, n0, opts.rel_tol, 1e-3, opts.max_nodes);
        }
    }
    auto d = ddy_even_halfplane(P, nx, ny, dy);
    auto h = hilbert_odd_halfplane(d, nx, ny);
    std::vector<double> v(igrid.size());
    for (std::size_t j = 0; j < igrid.ny; ++j) {
        auto q = static_cast<std::size_t>(std::llround(std::abs(igrid.y(j)) / dy));
        for (std::size_t i = 0; i < nx; ++i)
            v[j * nx + i] = InversionConstants::c1 * h[q * nx + i] * (odd ? igrid.x(i) : 1.0);
    }
    return Image(igrid, std::move(v));
}

std::string basis_cache_key(const BasisIndex& idx, const ImageGrid& g, double L, double R) {
    std::ostringstream os;
    os << std::setprecision(10) << "basis_" << (idx.parity == Parity::even ? "e" : "o") << "_k" << idx.k << "_l"
       << idx.l << "_L" << L << "_R" << R << "_g" << g.nx << "x" << g.ny << "_d" << g.dx << "x" << g.dy << "_o"
       << g.x0 << "x" << g.y0 << ".raw";
    return os.str();
}

Image invert_ortho(const DataField& data, std::size_t k_max, std::size_t l_max, const ImageGrid& igrid,
                   const OrthoOptions& opts) {
    const auto& g = data.grid();
    double L = opts.L > 0.0 ? opts.L : std::min(-g.track_min, g.track_max);
    double R = opts.R > 0.0 ? opts.R : g.radius_max;
    CoeffTable c = project_data(data, k_max, l_max, L, R, opts.projection);
    Image out(igrid);
    auto& ov = out.values();
    for (Parity par : {Parity::even, Parity::odd})
        for (std::size_t k = 0; k <= k_max; ++k)
            for (std::size_t l = 0; l <= l_max; ++l) {
                double w = c.at(par, k, l);
                if (w == 0.0) continue;
                BasisIndex idx{par, k, l};
                Image b;
                std::string path;
                bool have = false;
                if (!opts.cache_dir.empty()) {
                    path = (std::filesystem::path(opts.cache_dir) / basis_cache_key(idx, igrid, L, R)).string();
                    if (std::filesystem::exists(path + ".hdr")) {
                        b = read_image(path);
                        have = b.grid() == igrid;
                    }
                }
                if (!have) {
                    b = basis_reconstruction(idx, igrid, L, R, opts.basis);
                    if (!path.empty()) write_image(path, b, {{"basis", path}});
                }
                const auto& bv = b.values();
                for (std::size_t n = 0; n < ov.size(); ++n) ov[n] += w * bv[n];
            }
    out.require_finite("ortho reconstruction");
    return out;
}

}  // namespace sart
