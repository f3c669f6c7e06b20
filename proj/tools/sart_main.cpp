#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sart/config.hpp"
#include "sart/error.hpp"
#include "sart/fbp.hpp"
#include "sart/field_io.hpp"
#include "sart/forward.hpp"
#include "sart/ghost.hpp"
#include "sart/lr.hpp"
#include "sart/metrics.hpp"
#include "sart/ortho.hpp"
#include "sart/scenario.hpp"
#include "sart/spectral.hpp"

namespace fs = std::filesystem;
using namespace sart;

namespace {

struct GeoArgs {
    std::string path;
    std::vector<std::string> sets;

    Config config() const {
        Config c = path.empty() ? Config{} : Config::load(path);
        c.apply_overrides(sets);
        return c;
    }
};

void add_geo(CLI::App* app, GeoArgs& g) {
    app->add_option("--geometry", g.path, "INI file with a [geometry] section");
    app->add_option("--set", g.sets, "override section.key=value")->take_all();
}

void save(const std::string& out, const Image& img, const Meta& meta = {}) {
    img.require_finite("output image");
    write_image(out, img, meta);
}

void save(const std::string& out, const DataField& d, const Meta& meta = {}) {
    d.require_finite("output data");
    write_data(out, d, meta);
}

Disc parse_disc_arg(const std::string& s) {
    std::istringstream is(s);
    std::string tok;
    int n = 0;
    while (is >> tok) ++n;
    // amplitude plays no part in region masks
    auto v = parse_discs(n == 3 ? s + " 1" : s);
    if (v.size() != 1) throw ValidationError("expected one disc 'xc yc radius [amplitude]'");
    return v[0];
}

std::vector<long> parse_positions(const std::string& s) {
    Config c;
    c.set("p.x", s);
    return c.get_longs("p.x");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical-mean SAR reconstruction toolkit"};
    app.require_subcommand(1);

    // phantom
    GeoArgs ph_geo;
    std::string ph_out, ph_discs, ph_blobs;
    bool ph_pgm = false;
    auto* ph = app.add_subcommand("phantom", "render a phantom on the image grid");
    add_geo(ph, ph_geo);
    ph->add_option("--discs", ph_discs, "'xc yc radius amplitude; ...'");
    ph->add_option("--blobs", ph_blobs, "'xc yc sigma amplitude [mirrored]; ...'");
    ph->add_option("--out", ph_out)->required();
    ph->add_flag("--pgm", ph_pgm, "also write <out>.pgm");

    // forward
    GeoArgs fw_geo;
    std::string fw_in, fw_out;
    std::size_t fw_angles = 0;
    bool fw_analytic = false;
    auto* fw = app.add_subcommand("forward", "circle means of an image");
    add_geo(fw, fw_geo);
    fw->add_option("--in", fw_in, "image file");
    fw->add_option("--angles", fw_angles, "angular nodes (default 4 max(nx, ny))");
    fw->add_flag("--analytic", fw_analytic, "closed-form projection of the [phantom] section");
    fw->add_option("--out", fw_out)->required();

    // noise
    std::string nz_in, nz_out;
    double nz_pct = 0.0, nz_add = 0.01;
    std::uint64_t nz_seed = 0, nz_id = 0;
    auto* nz = app.add_subcommand("noise", "multiplicative plus additive Gaussian noise");
    nz->add_option("--in", nz_in)->required();
    nz->add_option("--percent", nz_pct, "fraction, 0.1 = 10%")->required();
    nz->add_option("--additive-scale", nz_add);
    nz->add_option("--seed", nz_seed);
    nz->add_option("--field-id", nz_id);
    nz->add_option("--out", nz_out)->required();

    // invert
    auto* inv = app.add_subcommand("invert", "reconstruct an image from data");
    inv->require_subcommand(1);
    GeoArgs iv_geo;
    std::string iv_in, iv_out, iv_mode = "approximate", iv_cache;
    double iv_yext = 2.0, iv_L = 0.0, iv_R = 0.0;
    std::size_t iv_k = 8, iv_l = 8;
    auto* ifbp = inv->add_subcommand("fbp", "filtered backprojection");
    auto* ifou = inv->add_subcommand("fourier", "spectral inversion");
    auto* iort = inv->add_subcommand("ortho", "orthogonal basis inversion");
    for (auto* s : {ifbp, ifou, iort}) {
        add_geo(s, iv_geo);
        s->add_option("--in", iv_in)->required();
        s->add_option("--out", iv_out)->required();
    }
    ifbp->add_option("--mode", iv_mode, "zero_fill | approximate");
    ifbp->add_option("--y-extension", iv_yext);
    iort->add_option("--k", iv_k);
    iort->add_option("--l", iv_l);
    iort->add_option("--L", iv_L);
    iort->add_option("--R", iv_R);
    iort->add_option("--cache", iv_cache);

    // ghost
    GeoArgs gh_geo;
    std::string gh_family = "range", gh_out, gh_batch;
    double gh_a = 0.0, gh_b = 0.0;
    std::size_t gh_l = 0;
    bool gh_sub = false;
    auto* gh = app.add_subcommand("ghost", "null-space image for a family member");
    add_geo(gh, gh_geo);
    gh->add_option("--family", gh_family, "range | even | odd");
    gh->add_option("--a", gh_a);
    gh->add_option("--b", gh_b);
    gh->add_option("--l", gh_l);
    gh->add_flag("--subtract-baseline", gh_sub);
    gh->add_option("--batch", gh_batch, "CSV with columns family,a,b_or_l");
    gh->add_option("--out", gh_out, "output file (directory with --batch)")->required();

    // lr resolve
    auto* lr = app.add_subcommand("lr", "left-right resolution");
    lr->require_subcommand(1);
    auto* lrr = lr->add_subcommand("resolve", "resolve from even images about several tracks");
    std::string lr_ph, lr_pos = "0,1", lr_mode = "direct", lr_res = "exact", lr_out, lr_inter;
    double lr_noise = 0.0, lr_eps = 1e-2, lr_add = 0.01;
    int lr_k = 2;
    std::uint64_t lr_seed = 0;
    bool lr_ref_only = false;
    lrr->add_option("--phantom", lr_ph, "image file containing the track row")->required();
    lrr->add_option("--positions", lr_pos);
    lrr->add_option("--noise", lr_noise);
    lrr->add_option("--additive-scale", lr_add);
    lrr->add_option("--seed", lr_seed);
    lrr->add_option("--mode", lr_mode, "direct | radon");
    lrr->add_option("--resolver", lr_res, "exact | reg");
    lrr->add_option("--eps", lr_eps);
    lrr->add_option("--k", lr_k);
    lrr->add_flag("--reference-pairs-only", lr_ref_only);
    lrr->add_option("--out", lr_out)->required();
    lrr->add_option("--emit-intermediates", lr_inter);

    // compare
    std::string cm_a, cm_b, cm_metric = "l2_relative", cm_region, cm_mirror;
    double cm_erosion = 3.0;
    auto* cm = app.add_subcommand("compare", "scalar comparison of two images");
    cm->add_option("--a", cm_a)->required();
    cm->add_option("--b", cm_b)->required();
    cm->add_option("--metric", cm_metric);
    cm->add_option("--region", cm_region, "'xc yc radius' disc");
    cm->add_option("--mirror", cm_mirror, "'xc yc radius' disc");
    cm->add_option("--erosion", cm_erosion);

    // scenario run
    auto* sc = app.add_subcommand("scenario", "reproducible experiments");
    sc->require_subcommand(1);
    auto* scr = sc->add_subcommand("run", "run a named scenario");
    std::string sc_name, sc_dir = "scenarios", sc_out;
    std::vector<std::string> sc_sets;
    bool sc_smoke = false;
    scr->add_option("name", sc_name)->required();
    scr->add_option("--config-dir", sc_dir);
    scr->add_option("--out", sc_out)->required();
    scr->add_option("--set", sc_sets)->take_all();
    scr->add_flag("--smoke", sc_smoke, "apply the [smoke] overrides (64x64 grids)");
    auto* scl = sc->add_subcommand("list", "list scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ph) {
            Config c = ph_geo.config();
            if (!ph_discs.empty()) c.set("phantom.discs", ph_discs);
            if (!ph_blobs.empty()) c.set("phantom.blobs", ph_blobs);
            PhantomSpec s;
            if (c.has("phantom.discs")) s.discs = parse_discs(c.get_string("phantom.discs"));
            if (c.has("phantom.blobs")) s.blobs = parse_blobs(c.get_string("phantom.blobs"));
            Image img = render_phantom(s, GeometryConfig::from(c).image);
            save(ph_out, img);
            if (ph_pgm) write_pgm(ph_out + ".pgm", img);
        } else if (*fw) {
            Config c = fw_geo.config();
            GeometryConfig geo = GeometryConfig::from(c);
            DataField d;
            if (fw_analytic) {
                PhantomSpec s;
                if (c.has("phantom.discs")) s.discs = parse_discs(c.get_string("phantom.discs"));
                if (c.has("phantom.blobs")) s.blobs = parse_blobs(c.get_string("phantom.blobs"));
                d = project_phantom(s, geo.data);
            } else {
                if (fw_in.empty()) throw ValidationError("--in or --analytic is required");
                Image img = read_image(fw_in);
                d = forward(img, geo.data, fw_angles ? fw_angles : default_angles(img.grid()));
            }
            save(fw_out, d);
        } else if (*nz) {
            NoiseSpec ns{nz_pct, nz_add, nz_seed};
            Meta meta{{"noise_percent", std::to_string(nz_pct)}, {"noise_seed", std::to_string(nz_seed)}};
            if (read_kind(nz_in) == "data") save(nz_out, add_noise(read_data(nz_in), ns, nz_id), meta);
            else save(nz_out, add_noise(read_image(nz_in), ns, nz_id), meta);
        } else if (*inv) {
            ImageGrid ig = GeometryConfig::from(iv_geo.config()).image;
            DataField d = read_data(iv_in);
            if (*ifbp) {
                FbpOptions o;
                if (iv_mode == "zero_fill") o.mode = ContinuationMode::zero_fill;
                else if (iv_mode == "approximate") o.mode = ContinuationMode::approximate;
                else throw ValidationError("--mode must be zero_fill or approximate");
                o.y_extension = iv_yext;
                save(iv_out, invert_fbp(d, ig, o), {{"mode", iv_mode}});
            } else if (*ifou) {
                save(iv_out, invert_fourier(d, ig));
            } else {
                OrthoOptions o;
                o.L = iv_L;
                o.R = iv_R;
                o.cache_dir = iv_cache;
                save(iv_out, invert_ortho(d, iv_k, iv_l, ig, o));
            }
        } else if (*gh) {
            Config c = gh_geo.config();
            GeometryConfig geo = GeometryConfig::from(c);
            auto make = [&](const std::string& fam, double a, double q) {
                GhostParams p;
                p.L = geo.L > 0 ? geo.L : 1.0;
                p.R = geo.R > 0 ? geo.R : 1.0;
                p.a = a;
                if (fam == "range") p.family = GhostFamily::range, p.b = q;
                else if (fam == "even" || fam == "odd") {
                    p.family = fam == "even" ? GhostFamily::even : GhostFamily::odd;
                    if (q < 0 || q != std::round(q)) throw ValidationError("l must be a nonnegative integer");
                    p.l = static_cast<std::size_t>(q);
                } else throw ValidationError("--family must be range, even or odd");
                return p;
            };
            if (gh_batch.empty()) {
                double q = gh_family == "range" ? gh_b : static_cast<double>(gh_l);
                save(gh_out, ghost_image(make(gh_family, gh_a, q), gh_sub, geo.image),
                     {{"family", gh_family}, {"delta", "nearest track sample, 1/d_track"}});
            } else {
                std::ifstream f(gh_batch);
                if (!f) throw ValidationError("cannot open " + gh_batch);
                fs::create_directories(gh_out);
                std::string line;
                std::size_t n = 0;
                while (std::getline(f, line)) {
                    if (line.empty() || line[0] == '#' || line.rfind("family", 0) == 0) continue;
                    std::replace(line.begin(), line.end(), ',', ' ');
                    std::istringstream is(line);
                    std::string fam;
                    double a, q;
                    if (!(is >> fam >> a >> q)) throw ValidationError("bad batch line '" + line + "'");
                    std::string out = (fs::path(gh_out) / ("ghost_" + std::to_string(n++))).string();
                    save(out, ghost_image(make(fam, a, q), gh_sub, geo.image), {{"family", fam}});
                    std::cout << out << '\n';
                }
            }
        } else if (*lrr) {
            Image phantom = read_image(lr_ph);
            LrConfig lc;
            if (lr_mode == "direct") lc.mode = LrMode::direct;
            else if (lr_mode == "radon") lc.mode = LrMode::via_radon;
            else throw ValidationError("--mode must be direct or radon");
            if (lr_res != "exact" && lr_res != "reg") throw ValidationError("--resolver must be exact or reg");
            lc.exact = lr_res == "exact";
            lc.reg.epsilon = lr_eps;
            lc.reg.cos_power_k = lr_k;
            lc.resolve.all_pairs = !lr_ref_only;
            LrResult r = lr_pipeline(phantom, AntennaArray{parse_positions(lr_pos)}, NoiseSpec{lr_noise, lr_add, lr_seed}, lc);
            save(lr_out, r.resolved, {{"resolver", lr_res}, {"epsilon", std::to_string(lr_eps)}, {"k", std::to_string(lr_k)}});
            if (!lr_inter.empty()) {
                fs::create_directories(lr_inter);
                for (const auto& [b, img] : r.used_even)
                    save((fs::path(lr_inter) / ("even_" + std::to_string(b))).string(), img);
            }
        } else if (*cm) {
            Image a = read_image(cm_a), b = read_image(cm_b);
            CompareOptions o;
            o.erosion = cm_erosion;
            if (!cm_region.empty()) o.region = parse_disc_arg(cm_region);
            if (!cm_mirror.empty()) o.mirror = parse_disc_arg(cm_mirror);
            MetricKind k = parse_metric(cm_metric);
            std::cout << metric_name(k) << ' ' << format_metric(compare(a, b, k, o)) << '\n';
        } else if (*scl) {
            for (const auto& n : scenario_names()) std::cout << n << '\n';
        } else if (*scr) {
            Config c = scenario_config(sc_name, sc_dir, sc_smoke, sc_sets);
            ScenarioReport r = run_scenario(sc_name, c, sc_out);
            for (const auto& m : r.metrics) std::cout << m.stage << ' ' << m.metric << ' ' << format_metric(m.value) << '\n';
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
