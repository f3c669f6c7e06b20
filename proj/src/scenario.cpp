#include "sart/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sart/error.hpp"
#include "sart/fbp.hpp"
#include "sart/field_io.hpp"
#include "sart/forward.hpp"
#include "sart/ghost.hpp"
#include "sart/lr.hpp"
#include "sart/metrics.hpp"
#include "sart/ortho.hpp"

namespace fs = std::filesystem;

namespace sart {

namespace {

struct Ctx {
    const Config& cfg;
    fs::path dir;
    ScenarioReport rep;

    void metric(const std::string& stage, const std::string& name, double v) { rep.metrics.push_back({stage, name, v}); }
    void image(const std::string& stem, const Image& img, const Meta& meta = {}) {
        write_image((dir / stem).string(), img, meta);
        write_pgm((dir / (stem + ".pgm")).string(), img);
        rep.files.push_back(stem);
        rep.files.push_back(stem + ".hdr");
        rep.files.push_back(stem + ".pgm");
    }
    void pgm(const std::string& stem, const Image& img) {
        write_pgm((dir / (stem + ".pgm")).string(), img);
        rep.files.push_back(stem + ".pgm");
    }
    void profile(const std::string& stem, const Profile& p, const std::string& axis) {
        write_profile_csv((dir / (stem + ".csv")).string(), p, axis);
        rep.files.push_back(stem + ".csv");
    }
};

PhantomSpec phantom_from(const Config& c) {
    PhantomSpec s;
    if (c.has("phantom.discs")) s.discs = parse_discs(c.get_string("phantom.discs"));
    if (c.has("phantom.blobs")) s.blobs = parse_blobs(c.get_string("phantom.blobs"));
    s.validate();
    return s;
}

std::string num_tag(double v) {
    std::ostringstream os;
    os << v;
    std::string s = os.str();
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

ContinuationMode parse_mode(const std::string& s) {
    if (s == "zero_fill") return ContinuationMode::zero_fill;
    if (s == "approximate") return ContinuationMode::approximate;
    throw ValidationError("unknown continuation mode '" + s + "' (zero_fill, approximate)");
}

std::vector<unsigned char> box_mask(const ImageGrid& g, double xlo, double xhi, double ylo, double yhi) {
    std::vector<unsigned char> m(g.size(), 0);
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i)
            m[j * g.nx + i] = g.x(i) >= xlo && g.x(i) < xhi && g.y(j) >= ylo && g.y(j) < yhi;
    return m;
}

DataField ladder_data(const Config& c, const PhantomSpec& ph, const GeometryConfig& geo) {
    std::string src = c.get_string("ladder.data", "analytic");
    if (src == "analytic") return project_phantom(ph, geo.data);
    if (src == "numeric") {
        Image img = render_phantom(ph, geo.image);
        auto na = static_cast<std::size_t>(c.get_long("ladder.n_angles", static_cast<long>(default_angles(geo.image))));
        return forward(img, geo.data, na);
    }
    throw ValidationError("ladder.data must be analytic or numeric");
}

// Negative ring about each end of the track, expected where circles about
// that end stop meeting the object.
void ring_dip(Ctx& ctx, const Config& c, const std::string& st, const Image& rec, const GeometryConfig& geo,
              const Disc& obj) {
    const double pi = std::numbers::pi;
    const double lo = c.get_double("dip.angle_min_deg", 30.0) * pi / 180.0;
    const double hi = c.get_double("dip.angle_max_deg", 90.0) * pi / 180.0;
    const long n = c.get_long("dip.n_rays", 13);
    const double win = c.get_double("dip.window", 40.0);
    const double ends[2] = {geo.data.track_min, geo.data.track_max};
    double err = 0.0;
    for (int e = 0; e < 2; ++e) {
        double z = ends[e];
        double expect = std::hypot(obj.xc - z, obj.yc) + obj.radius;
        std::vector<double> th;
        for (long k = 0; k < n; ++k) {
            double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(std::max(1L, n - 1));
            th.push_back(e == 0 ? t : pi - t);
        }
        double found = ring_min_radius(rec, z, 0.0, th, std::max(0.0, expect - win), expect + win);
        const char* side = e == 0 ? "left" : "right";
        ctx.metric(st, std::string("dip_radius_") + side, found);
        ctx.metric(st, std::string("dip_expected_") + side, expect);
        err = std::max(err, std::abs(found - expect) / rec.grid().dx);
    }
    ctx.metric(st, "dip_error_px", err);
}

void run_ch2(Ctx& ctx) {
    const Config& c = ctx.cfg;
    PhantomSpec ph = phantom_from(c);
    GeometryConfig base = GeometryConfig::from(c);
    const ImageGrid& ig = base.image;
    Image truth = render_phantom(ph, ig);
    ctx.image("phantom", truth);
    const Disc& obj = ph.discs.at(0);
    double erosion = c.get_double("metrics.erosion", 3.0);
    double row = c.get_double("ladder.profile_row", obj.yc);
    auto near = box_mask(ig, -c.get_double("metrics.near_half_width"), c.get_double("metrics.near_half_width"),
                         -1e300, c.get_double("metrics.near_ymax"));
    FbpOptions fo;
    fo.y_extension = c.get_double("ladder.y_extension", 2.0);

    for (double m : c.get_doubles("ladder.extents")) {
        Config ce = c;
        ce.set("geometry.extent", format_metric(m));
        GeometryConfig geo = GeometryConfig::from(ce);
        DataField data = ladder_data(c, ph, geo);
        std::string et = "ext" + num_tag(m);
        if (m == 1.0) {
            write_pgm((ctx.dir / "data_ext1.pgm").string(), data);
            ctx.rep.files.push_back("data_ext1.pgm");
        }
        std::vector<Image> recs;
        for (const auto& ms : c.get_strings("ladder.modes")) {
            fo.mode = parse_mode(ms);
            Image rec = invert_fbp(data, ig, fo);
            std::string st = et + "_" + ms;
            ctx.image(st, rec, {{"mode", ms}, {"extent", format_metric(m)}});
            ctx.profile("profile_" + st, cross_section(rec, row), "x");
            ctx.metric(st, "plateau_amplitude", plateau_amplitude(rec, obj, erosion));
            ctx.metric(st, "l2_relative", l2_relative(rec, truth));
            ctx.metric(st, "near_object_mae", mean_abs_error(rec, truth, near));
            if (m == 1.0 && fo.mode == ContinuationMode::zero_fill) ring_dip(ctx, c, st, rec, geo, obj);
            recs.push_back(std::move(rec));
        }
        if (recs.size() == 2) ctx.metric(et, "mode_l2_difference", l2_relative(recs[1], recs[0]));
    }
}

GhostParams parse_ghost(const std::string& item, double L, double R) {
    std::istringstream is(item);
    std::string fam;
    double a = 0.0, q = 0.0;
    if (!(is >> fam >> a >> q)) throw ValidationError("bad ghost entry '" + item + "'");
    GhostParams p;
    p.L = L;
    p.R = R;
    p.a = a;
    if (fam == "range") p.family = GhostFamily::range, p.b = q;
    else if (fam == "even" || fam == "odd") {
        p.family = fam == "even" ? GhostFamily::even : GhostFamily::odd;
        if (q < 0.0 || q != std::round(q)) throw ValidationError("ghost l must be a nonnegative integer");
        p.l = static_cast<std::size_t>(q);
    } else throw ValidationError("ghost family must be range, even or odd");
    return p;
}

// Energy of the forward data inside the measured region (guarded) over the
// energy outside it.
double null_ratio(const DataField& d, double L, double R, double guard) {
    const auto& g = d.grid();
    double in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < g.n_track; ++i)
        for (std::size_t j = 0; j < g.n_radius; ++j) {
            double x = std::abs(g.z(i)), r = g.r(j), v = d.at(i, j) * d.at(i, j);
            if (x < L - guard && r < R - guard) in += v;
            else if (x > L + guard || r > R + guard) out += v;
        }
    return out > 0.0 ? std::sqrt(in / out) : INFINITY;
}

// Median over view columns of the distance (in pixels) between the
// per-column magnitude peak and the circle of radius R about (a, 0).
double ridge_offset(const Image& img, double a, double R, double xlo, double xhi, double ylo, double yhi) {
    const auto& g = img.grid();
    std::vector<double> dev;
    for (std::size_t i = 0; i < g.nx; ++i) {
        double x = g.x(i);
        if (x < xlo || x > xhi || std::abs(x - a) > R - 4.0 * g.dx) continue;
        double best = -1.0, by = 0.0;
        for (std::size_t j = 0; j < g.ny; ++j) {
            double y = g.y(j);
            if (y < ylo || y > yhi) continue;
            if (std::abs(img.at(i, j)) > best) best = std::abs(img.at(i, j)), by = y;
        }
        if (best < 0.0) continue;
        double yc = std::sqrt(R * R - (x - a) * (x - a));
        if (yc > yhi) continue;
        dev.push_back(std::abs(by - yc) / g.dy);
    }
    if (dev.empty()) return INFINITY;
    std::nth_element(dev.begin(), dev.begin() + static_cast<long>(dev.size() / 2), dev.end());
    return dev[dev.size() / 2];
}

Image crop(const Image& img, double xlo, double xhi, double ylo, double yhi) {
    const auto& g = img.grid();
    std::size_t i0 = g.nx, i1 = 0, j0 = g.ny, j1 = 0;
    for (std::size_t i = 0; i < g.nx; ++i)
        if (g.x(i) >= xlo - 1e-9 && g.x(i) <= xhi + 1e-9) i0 = std::min(i0, i), i1 = std::max(i1, i);
    for (std::size_t j = 0; j < g.ny; ++j)
        if (g.y(j) >= ylo - 1e-9 && g.y(j) <= yhi + 1e-9) j0 = std::min(j0, j), j1 = std::max(j1, j);
    if (i0 > i1 || j0 > j1) throw ValidationError("view window outside the image");
    ImageGrid cg{i1 - i0 + 1, j1 - j0 + 1, g.dx, g.dy, g.x(i0), g.y(j0)};
    Image out(cg);
    for (std::size_t j = j0; j <= j1; ++j)
        for (std::size_t i = i0; i <= i1; ++i) out.at(i - i0, j - j0) = img.at(i, j);
    return out;
}

// Clip magnitudes at cap * (q-quantile of |v|) for display.
Image capped(const Image& img, double q, double cap) {
    std::vector<double> a;
    for (double v : img.values()) a.push_back(std::abs(v));
    if (a.empty()) return img;
    auto k = static_cast<std::size_t>(q * static_cast<double>(a.size() - 1));
    std::nth_element(a.begin(), a.begin() + static_cast<long>(k), a.end());
    double lim = cap * a[k];
    Image out = img;
    if (lim > 0.0)
        for (double& v : out.values()) v = std::clamp(v, -lim, lim);
    return out;
}

void run_ch3(Ctx& ctx) {
    const Config& c = ctx.cfg;
    GeometryConfig geo = GeometryConfig::from(c);
    const double L = geo.L, R = geo.R;
    bool subtract = c.get_bool("ghosts.subtract_baseline", true);
    GhostImageOptions go;
    go.y_extension = c.get_double("ghosts.y_extension", go.y_extension);
    go.smooth_px = c.get_double("ghosts.smooth_px", go.smooth_px);
    const double vx0 = c.get_double("view.x_min", 0.0), vx1 = c.get_double("view.x_max", 1.0);
    const double vy0 = c.get_double("view.y_min", 0.0), vy1 = c.get_double("view.y_max", 1.0);
    const double guard = c.get_double("ghosts.guard_pixels", 5.0) * geo.image.dx;
    auto na = static_cast<std::size_t>(c.get_long("ghosts.n_angles", static_cast<long>(default_angles(geo.image))));
    const double cap_q = c.get_double("view.cap_quantile", 0.99), cap_f = c.get_double("view.cap_factor", 1.0);

    std::string list = c.get_string("ghosts.list");
    std::istringstream is(list);
    std::string item;
    std::size_t n = 0;
    while (std::getline(is, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        GhostParams p = parse_ghost(item, L, R);
        std::string fam = p.family == GhostFamily::range ? "range" : p.family == GhostFamily::even ? "even" : "odd";
        std::string st = "ghost" + std::to_string(n++) + "_" + fam + "_a" + num_tag(p.a) + "_" +
                         (p.family == GhostFamily::range ? "b" + num_tag(p.b) : "l" + std::to_string(p.l));
        Image img = ghost_image(p, subtract, geo.image, go);
        ctx.image(st, img, {{"family", fam}});
        Image view = crop(img, vx0, vx1, vy0, vy1);
        ctx.pgm(st + "_view", capped(view, cap_q, cap_f));
        DataField d = forward(img, geo.data, na);
        ctx.metric(st, "max_abs_view", *std::max_element(view.values().begin(), view.values().end(),
                                                         [](double u, double v) { return std::abs(u) < std::abs(v); }));
        ctx.metric(st, "null_ratio", null_ratio(d, L, R, guard));
        if (p.family == GhostFamily::range) ctx.metric(st, "ridge_offset_px", ridge_offset(img, p.a, R, vx0, vx1, vy0, vy1));
    }
}

// Relative L2 of (a - b) over the nodes where `a` is synthesised.
double region_error(const DataField& syn, const DataField& ref, double L, double R) {
    const auto& g = syn.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.n_track; ++i)
        for (std::size_t j = 0; j < g.n_radius; ++j) {
            if (!(std::abs(g.z(i)) < L - 0.5 * g.d_track) || !(g.r(j) < R - 0.5 * g.d_radius)) continue;
            double d = syn.at(i, j) - ref.at(i, j);
            num += d * d;
            den += ref.at(i, j) * ref.at(i, j);
        }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void run_ch4(Ctx& ctx) {
    const Config& c = ctx.cfg;
    PhantomSpec ph = phantom_from(c);
    GeometryConfig geo = GeometryConfig::from(c);
    Image truth = render_phantom(ph, geo.image);
    ctx.image("phantom", truth);
    std::string src = c.get_string("ortho.data", "numeric");
    DataField data = src == "analytic"
                         ? project_phantom(ph, geo.data)
                         : forward(truth, geo.data,
                                   static_cast<std::size_t>(c.get_long("ortho.n_angles",
                                                                       static_cast<long>(default_angles(geo.image)))));
    ctx.rep.files.push_back("data.pgm");
    write_pgm((ctx.dir / "data.pgm").string(), data);
    const double L = geo.L, R = geo.R;

    for (long k : c.get_longs("ortho.resynthesis_k")) {
        auto kk = static_cast<std::size_t>(k);
        CoeffTable t = project_data(data, kk, kk, L, R);
        DataField syn = resynthesize(t, geo.data);
        ctx.metric("resynthesis_k" + std::to_string(k), "l2_relative", region_error(syn, data, L, R));
    }

    OrthoOptions oo;
    oo.L = L;
    oo.R = R;
    oo.cache_dir = (ctx.dir / "basis_cache").string();
    oo.basis.rel_tol = c.get_double("ortho.basis_rel_tol", oo.basis.rel_tol);
    auto ki = static_cast<std::size_t>(c.get_long("ortho.image_k"));
    Image rec = invert_ortho(data, ki, ki, geo.image, oo);
    ctx.image("ortho_k" + std::to_string(ki), rec);
    // Reference: fbp of the same data cut to the basis region.
    DataField cut = data;
    for (std::size_t i = 0; i < cut.grid().n_track; ++i)
        for (std::size_t j = 0; j < cut.grid().n_radius; ++j)
            if (!(std::abs(cut.grid().z(i)) < L) || !(cut.grid().r(j) < R)) cut.at(i, j) = 0.0;
    const std::string fm = c.get_string("ortho.fbp_mode", "zero_fill");
    Image fbp = invert_fbp(cut, geo.image, parse_mode(fm));
    ctx.image("fbp_" + fm, fbp);
    double iw = c.get_double("metrics.interior_half_width"), iy = c.get_double("metrics.interior_ymax");
    auto interior = box_mask(geo.image, -iw, iw, -1e300, iy);
    ctx.metric("ortho_k" + std::to_string(ki), "l2_relative_vs_fbp", l2_relative(rec, fbp, interior));
    ctx.metric("ortho_k" + std::to_string(ki), "l2_relative", l2_relative(rec, truth));
    ctx.metric("fbp_" + fm, "l2_relative", l2_relative(fbp, truth));
    double row = c.get_double("ortho.profile_row", 0.0);
    ctx.profile("profile_ortho", cross_section(rec, row), "x");
    ctx.profile("profile_fbp", cross_section(fbp, row), "x");
}

void run_ch5(Ctx& ctx) {
    const Config& c = ctx.cfg;
    PhantomSpec ph = phantom_from(c);
    GeometryConfig geo = GeometryConfig::from(c);
    Image truth = render_phantom(ph, geo.image);
    ctx.image("phantom", truth);
    Disc region = parse_discs(c.get_string("metrics.true_region")).at(0);
    Disc mirror = parse_discs(c.get_string("metrics.mirror_region")).at(0);
    auto seed = static_cast<std::uint64_t>(c.get_long("noise.seed", 0));
    double add = c.get_double("noise.additive_scale", 0.01);

    LrConfig lc;
    std::string mode = c.get_string("lr.mode", "direct");
    if (mode == "direct") lc.mode = LrMode::direct;
    else if (mode == "radon") lc.mode = LrMode::via_radon;
    else throw ValidationError("lr.mode must be direct or radon");
    lc.reg.epsilon = c.get_double("lr.epsilon", lc.reg.epsilon);
    lc.reg.cos_power_k = static_cast<int>(c.get_long("lr.cos_power_k", lc.reg.cos_power_k));
    lc.resolve.all_pairs = c.get_string("lr.pairs", "all") == "all";

    std::string sets = c.get_string("lr.position_sets");
    std::istringstream is(sets);
    std::string item;
    while (std::getline(is, item, '|')) {
        Config tmp;
        tmp.set("x.p", item);
        AntennaArray ant{tmp.get_longs("x.p")};
        ant.validate();
        std::string tag = "pos";
        for (long p : ant.positions) tag += "_" + std::to_string(p);
        std::string resolver = ant.positions.size() == 2 ? c.get_string("lr.two_set_resolver", "reg")
                                                         : c.get_string("lr.many_set_resolver", "exact");
        lc.exact = resolver == "exact";
        for (double pct : c.get_doubles("noise.levels")) {
            NoiseSpec ns{pct, add, seed};
            LrResult r = lr_pipeline(truth, ant, ns, lc);
            std::string st = tag + "_noise" + num_tag(pct);
            ctx.image(st, r.resolved, {{"resolver", resolver}});
            ctx.metric(st, "l2_relative", l2_relative(r.resolved, truth));
            ctx.metric(st, "mirror_suppression_ratio", mirror_suppression_ratio(r.resolved, region, mirror));
            ctx.profile("profile_" + st, column_section(r.resolved, region.xc), "y");
        }
    }
}

}  // namespace

std::vector<std::string> scenario_names() { return {"ch2_ladder", "ch3_ghost_sweep", "ch4_ortho", "ch5_antenna_sweep"}; }

namespace {

void known_or_throw(const std::string& name) {
    auto names = scenario_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) return;
    std::string msg = "unknown scenario '" + name + "'; known:";
    for (const auto& n : names) msg += " " + n;
    throw ValidationError(msg);
}

}  // namespace

Config scenario_config(const std::string& name, const std::string& dir, bool smoke,
                       const std::vector<std::string>& overrides) {
    known_or_throw(name);
    Config c = Config::load((fs::path(dir) / (name + ".ini")).string());
    if (smoke)
        for (const auto& [k, v] : c.section("smoke")) c.set(k, v);
    c.apply_overrides(overrides);
    return c;
}

std::string format_metric(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::string metrics_csv(const ScenarioReport& r, const Config& cfg) {
    std::ostringstream os;
    std::istringstream dump(cfg.dump());
    std::string line;
    while (std::getline(dump, line)) os << "# " << line << '\n';
    os << "scenario,stage,metric,value\n";
    for (const auto& m : r.metrics) os << r.name << ',' << m.stage << ',' << m.metric << ',' << format_metric(m.value) << '\n';
    return os.str();
}

ScenarioReport run_scenario(const std::string& name, const Config& cfg, const std::string& out_dir) {
    known_or_throw(name);
    fs::create_directories(out_dir);
    Ctx ctx{cfg, fs::path(out_dir), {}};
    ctx.rep.name = name;
    if (name == "ch2_ladder") run_ch2(ctx);
    else if (name == "ch3_ghost_sweep") run_ch3(ctx);
    else if (name == "ch4_ortho") run_ch4(ctx);
    else run_ch5(ctx);
    std::ofstream f(ctx.dir / "metrics.csv", std::ios::binary);
    f << metrics_csv(ctx.rep, cfg);
    if (!f) throw ValidationError("cannot write metrics.csv in " + out_dir);
    ctx.rep.files.push_back("metrics.csv");
    return ctx.rep;
}

}  // namespace sart
