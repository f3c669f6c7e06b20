#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sart/bessel.hpp"
#include "sart/error.hpp"
#include "sart/ghost.hpp"

using namespace sart;

namespace {

constexpr double kPi = std::numbers::pi;

GhostParams range_p(double a, double b, double L = 1, double R = 1) {
    GhostParams p;
    p.family = GhostFamily::range;
    p.a = a;
    p.b = b;
    p.L = L;
    p.R = R;
    return p;
}

GhostParams hankel_p(GhostFamily f, double a, std::size_t l, double L = 1, double R = 1) {
    GhostParams p;
    p.family = f;
    p.a = a;
    p.l = l;
    p.L = L;
    p.R = R;
    return p;
}

double max_abs(const Image& img) {
    double m = 0;
    for (double v : img.values()) m = std::max(m, std::abs(v));
    return m;
}

// u(s) = s exp(-s^2 / 2) so that s g is smooth and even in s, times a track
// envelope
constexpr double kR = 4.0;
double tail_g(double x, double r) {
    if (!(r > kR)) return 0.0;
    double s = std::sqrt(r * r - kR * kR);
    return s * std::exp(-0.5 * s * s) * std::exp(-x * x / 8);
}

double region_rel(const DataField& got, double R, bool outside_r) {
    const auto& g = got.grid();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < g.n_track; ++i)
        for (std::size_t j = 0; j < g.n_radius; ++j) {
            double x = g.z(i), r = g.r(j);
            if (outside_r && !(r > R + 0.5 * g.d_radius)) continue;
            double ref = tail_g(x, r), d = got.at(i, j) - ref;
            num += d * d;
            den += ref * ref;
        }
    return std::sqrt(num / den);
}

}  // namespace

TEST(GhostData, EvenVanishesInsideTrack) {
    auto p = hankel_p(GhostFamily::even, 2.0, 3, 1.0, 1.0);
    for (double x : {-0.99, -0.3, 0.0, 0.5, 0.99})
        for (double r : {0.1, 0.5, 0.9}) EXPECT_EQ(eval_ghost_data(p, x, r), 0.0);
    // and outside r < R
    EXPECT_EQ(eval_ghost_data(p, 1.5, 1.2), 0.0);
}

TEST(GhostData, EvenClosedForm) {
    auto p = hankel_p(GhostFamily::even, 1.7, 2, 1.0, 2.0);
    double x = 1.6, r = 0.8;
    double xs = std::sqrt(x * x - 1.0), rs = std::sqrt(4.0 - r * r);
    double ref = std::cyl_bessel_j(0.0, 1.7 * xs) * std::cos(2 * kPi * rs / 2.0) / rs;
    EXPECT_NEAR(eval_ghost_data(p, x, r), ref, 1e-12);
    EXPECT_NEAR(eval_ghost_data(p, -x, r), ref, 1e-12);
}

TEST(GhostData, RangeRadialFactor) {
    auto p = range_p(0.6, 0.25);
    for (double s : {0.1, 0.7, 3.0, 20.0}) {
        double r = std::sqrt(1.0 + s * s);
        EXPECT_NEAR(eval_ghost_data(p, 0.6, r), std::cos(0.25 * s) / s, 1e-12);
    }
    EXPECT_EQ(eval_ghost_data(p, 0.6, 0.9), 0.0);
    EXPECT_EQ(eval_ghost_data(p, 0.5, 2.0), 0.0);
}

TEST(GhostData, OddIsXTimesEven) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-3, 3), ur(0, 1);
    auto e = hankel_p(GhostFamily::even, 2.5, 4);
    auto o = hankel_p(GhostFamily::odd, 2.5, 4);
    for (int k = 0; k < 200; ++k) {
        double x = ux(rng), r = ur(rng);
        EXPECT_DOUBLE_EQ(eval_ghost_data(o, x, r), x * eval_ghost_data(e, x, r));
    }
}

TEST(GhostData, RangeFieldIsDiscreteDelta) {
    DataGrid dg = DataGrid::make(-2, 2, 3, 0.25, 0.25);
    auto p = range_p(0.6, 0.5);
    DataField f = ghost_data_field(p, dg);
    // nearest track sample to 0.6 is 0.5
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j) {
            double want = 0;
            if (std::abs(dg.z(i) - 0.5) < 1e-12 && dg.r(j) > 1.0) {
                double s = std::sqrt(dg.r(j) * dg.r(j) - 1.0);
                want = std::cos(0.5 * s) / s / dg.d_track;
            }
            EXPECT_NEAR(f.at(i, j), want, 1e-12);
        }
}

TEST(GhostData, BadParamsRejected) {
    auto p = range_p(0, -1);
    EXPECT_THROW(p.validate(), ValidationError);
    auto q = hankel_p(GhostFamily::even, -1, 1);
    EXPECT_THROW(q.validate(), ValidationError);
    auto r = range_p(0, 1, 0, 1);
    EXPECT_THROW(r.validate(), ValidationError);
}

TEST(Project, ZeroDataZeroTables) {
    DataGrid dg = DataGrid::make(-4, 4, 4, 1.0 / 16, 1.0 / 16);
    DataField z(dg);
    GhostParamGrid pg;
    pg.b_max = 4;
    pg.n_b = 16;
    pg.a_max = 4;
    pg.n_a = 16;
    pg.l_max = 3;
    for (double v : project_unmeasured(z, GhostFamily::range, 1, 1, pg).values) EXPECT_EQ(v, 0.0);
    auto t = project_unmeasured(z, GhostFamily::even, 1, 1, pg, true);
    for (double v : t.values) EXPECT_EQ(v, 0.0);
    for (double v : t.odd_values) EXPECT_EQ(v, 0.0);
}

TEST(Project, TrackEvenDataHasNoOddCoefficients) {
    DataGrid dg = DataGrid::make(-4, 4, 2, 1.0 / 16, 1.0 / 16);
    DataField d(dg);
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j)
            d.at(i, j) = std::exp(-dg.z(i) * dg.z(i)) * std::cos(dg.r(j));
    GhostParamGrid pg;
    pg.a_max = 4;
    pg.n_a = 12;
    pg.l_max = 4;
    auto t = project_unmeasured(d, GhostFamily::odd, 1, 1, pg);
    auto e = project_unmeasured(d, GhostFamily::even, 1, 1, pg);
    double emax = 0;
    for (double v : e.values) emax = std::max(emax, std::abs(v));
    ASSERT_GT(emax, 1e-3);
    for (double v : t.values) EXPECT_LT(std::abs(v), 1e-12 * emax);
}

TEST(Project, NeedsExtension) {
    GhostParamGrid pg;
    pg.b_max = 4;
    pg.n_b = 8;
    pg.a_max = 4;
    pg.n_a = 8;
    DataField d(DataGrid::make(-1, 1, 1, 1.0 / 16, 1.0 / 16));
    EXPECT_THROW(project_unmeasured(d, GhostFamily::range, 1, 1, pg), ValidationError);
    EXPECT_THROW(project_unmeasured(d, GhostFamily::even, 1, 1, pg), ValidationError);
    DataField ok(DataGrid::make(-1, 1, 2, 1.0 / 16, 1.0 / 16));
    pg.n_b = 1;
    EXPECT_THROW(project_unmeasured(ok, GhostFamily::range, 1, 1, pg), ValidationError);
}

TEST(Recover, ZeroTableZeroField) {
    GhostTable t;
    t.family = GhostFamily::even;
    DataGrid dg = DataGrid::make(-3, 3, 2, 0.125, 0.125);
    DataField f = recover_outside(t, dg);
    for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(Recover, SingleAtomIsFamilyMember) {
    DataGrid dg = DataGrid::make(-2, 2, 3, 0.25, 0.125);
    GhostTable t;
    t.family = GhostFamily::range;
    t.L = 1;
    t.R = 1;
    t.params.b_max = 3;
    t.params.n_b = 4;  // b = 0, 1, 2, 3, trapezoid weight 1 inside
    for (std::size_t i = 0; i < dg.n_track; ++i) t.track_pos.push_back(dg.z(i));
    t.values.assign(dg.n_track * 4, 0.0);
    auto ia = static_cast<std::size_t>((0.5 + 2) / 0.25);
    t.values[ia * 4 + 2] = 1.0;
    DataField f = recover_outside(t, dg);
    auto p = range_p(0.5, 2.0);
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j) {
            double r = dg.r(j);
            double want = (i == ia && r > 1 + 0.5 * dg.d_radius) ? eval_ghost_data(p, dg.z(i), r) : 0.0;
            EXPECT_NEAR(f.at(i, j), want, 1e-12) << i << " " << j;
        }
}

TEST(Recover, RangeRoundtripRefines) {
    // data tail beyond R = 4 out to r = 12; the b grid is refined in range
    // and density together
    DataGrid dg = DataGrid::make(-4, 4, 12, 0.5, 1.0 / 32);
    DataField d(dg);
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j) d.at(i, j) = tail_g(dg.z(i), dg.r(j));
    double prev = 1e300;
    std::vector<double> errs;
    for (auto [bmax, nb] : {std::pair{3.0, 7}, std::pair{6.0, 25}}) {
        GhostParamGrid pg;
        pg.b_max = bmax;
        pg.n_b = static_cast<std::size_t>(nb);
        double e = region_rel(recover_outside(project_unmeasured(d, GhostFamily::range, 1, kR, pg), dg), kR, true);
        errs.push_back(e);
        EXPECT_LT(e, prev);
        prev = e;
    }
    EXPECT_LT(errs.back(), 0.05);
    EXPECT_LT(errs.back(), 0.5 * errs.front());
}

TEST(Recover, EvenRoundtripOutsideTrack) {
    // g on |x| > L, r < R built from two family members; the projection
    // should hand back essentially the same field
    const double L = 1, R = 1;
    DataGrid dg = DataGrid::make(-8, 8, 1, 1.0 / 32, 1.0 / 64);
    DataField d(dg);
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j) {
            double x = dg.z(i), r = dg.r(j);
            if (!(std::abs(x) > L) || !(r < R)) continue;
            double xs = std::sqrt(x * x - L * L), rs = std::sqrt(R * R - r * r);
            // smooth in both substituted variables
            d.at(i, j) = std::exp(-xs * xs) * (1 + 0.5 * std::cos(kPi * rs / R)) * rs;
        }
    GhostParamGrid pg;
    pg.a_max = 12;
    pg.n_a = 97;
    pg.l_max = 12;
    auto t = project_unmeasured(d, GhostFamily::even, L, R, pg, true);
    DataField back = recover_outside(t, dg);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < dg.n_track; ++i)
        for (std::size_t j = 0; j < dg.n_radius; ++j) {
            double x = std::abs(dg.z(i)), r = dg.r(j);
            if (!(x > L + 0.1) || !(r < R - 0.1)) continue;
            double e = back.at(i, j) - d.at(i, j);
            num += e * e;
            den += d.at(i, j) * d.at(i, j);
        }
    EXPECT_LT(std::sqrt(num / den), 0.05);
}

TEST(GhostImage, BaselineOfItselfIsZero) {
    ImageGrid ig{33, 17, 1.0 / 16, 1.0 / 16, -1, 0};
    GhostImageOptions o;
    o.far_extent = 20;
    for (const auto& p : {range_p(0.3, 0.0), hankel_p(GhostFamily::even, 2.0, 0), hankel_p(GhostFamily::odd, 2.0, 0)}) {
        Image img = ghost_image(p, true, ig, o);
        for (double v : img.values()) EXPECT_EQ(v, 0.0);
    }
}

TEST(GhostImage, OddIsXTimesEvenImage) {
    ImageGrid ig{49, 25, 1.0 / 16, 1.0 / 16, -1.5, 0};
    Image e = ghost_image(hankel_p(GhostFamily::even, 3.0, 2), true, ig);
    Image o = ghost_image(hankel_p(GhostFamily::odd, 3.0, 2), true, ig);
    ASSERT_GT(max_abs(e), 0.0);
    for (std::size_t j = 0; j < ig.ny; ++j)
        for (std::size_t i = 0; i < ig.nx; ++i) {
            EXPECT_NEAR(o.at(i, j), ig.x(i) * e.at(i, j), 1e-12 * (1 + std::abs(o.at(i, j))));
            // even image is even in x, grid symmetric about 0
            EXPECT_NEAR(e.at(i, j), e.at(ig.nx - 1 - i, j), 1e-9 * (1 + std::abs(e.at(i, j))));
        }
}

TEST(GhostImage, RangeRidgeOnCircle) {
    // unit geometry, view [0,1]^2 at 64 px per unit
    const double a = 0.6, h = 1.0 / 64;
    ImageGrid ig{193, 65, h, h, -1.5, 0};
    Image img = ghost_image(range_p(a, 0.25), true, ig);
    std::vector<double> dev;
    for (std::size_t i = 0; i < ig.nx; ++i) {
        double x = ig.x(i);
        if (x < 0 || x > 1 || std::abs(x - a) > 1 - 4 * h) continue;
        double best = -1, by = 0;
        for (std::size_t j = 0; j < ig.ny; ++j)
            if (std::abs(img.at(i, j)) > best) best = std::abs(img.at(i, j)), by = ig.y(j);
        double yc = std::sqrt(1 - (x - a) * (x - a));
        dev.push_back(std::abs(by - yc) / h);
    }
    ASSERT_GT(dev.size(), 20u);
    std::sort(dev.begin(), dev.end());
    EXPECT_LE(dev[dev.size() / 2], 2.0);
}

TEST(GhostImage, EvenAmplitudeGrowsWithL) {
    // 1/128 keeps >= 8 samples per oscillation at l = 16; the view [0,1]^2
    // is rendered directly
    ImageGrid ig{129, 129, 1.0 / 128, 1.0 / 128, 0, 0};
    double prev = 0;
    for (std::size_t l : {1u, 4u, 16u}) {
        Image img = ghost_image(hankel_p(GhostFamily::even, 4.0, l), true, ig);
        double m = max_abs(img);
        EXPECT_GT(m, prev) << l;
        prev = m;
    }
}

TEST(GhostImage, RejectsMisalignedRows) {
    ImageGrid ig{9, 9, 0.1, 0.1, -0.4, 0.05};
    EXPECT_THROW(ghost_image(range_p(0, 1), true, ig), ValidationError);
    GhostImageOptions o;
    o.smooth_px = 0;
    EXPECT_THROW(ghost_image(range_p(0, 1), true, ImageGrid{9, 9, 0.1, 0.1, -0.4, 0}, o), ValidationError);
}
