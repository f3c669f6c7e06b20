#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sart/config.hpp"
#include "sart/fbp.hpp"
#include "sart/field_io.hpp"
#include "sart/forward.hpp"
#include "sart/metrics.hpp"

namespace fs = std::filesystem;
using namespace sart;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("SART_CLI");
    return p ? p : "./sart";
}

CliResult run(const std::string& args) {
    std::string cmd = cli() + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, f)) r.out += buf;
    int st = pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    std::string geo;

    void SetUp() override {
        dir = fs::temp_directory_path() / ("sart_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        geo = (dir / "geo.ini").string();
        std::ofstream(geo) << "[geometry]\nnx = 32\nny = 32\nx0 = -16\ny0 = 0\n"
                              "track_begin = -32\ntrack_end = 32\nradius_end = 48\nL = 8\nR = 8\n"
                              "[phantom]\ndiscs = 0 12 5 10\n";
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, PhantomMatchesLibrary) {
    ASSERT_EQ(run("phantom --geometry " + geo + " --out " + p("ph") + " --pgm").code, 0);
    Image img = read_image(p("ph"));
    Config c = Config::load(geo);
    PhantomSpec s;
    s.discs = parse_discs(c.get_string("phantom.discs"));
    EXPECT_EQ(img.values(), render_phantom(s, GeometryConfig::from(c).image).values());
    EXPECT_TRUE(fs::exists(p("ph.pgm")));
}

TEST_F(Cli, OverridesApply) {
    ASSERT_EQ(run("phantom --geometry " + geo + " --set geometry.nx=20 --discs '0 12 5 3' --out " + p("ph")).code, 0);
    Image img = read_image(p("ph"));
    EXPECT_EQ(img.grid().nx, 20u);
    double m = 0;
    for (double v : img.values()) m = std::max(m, v);
    EXPECT_EQ(m, 3.0);
}

TEST_F(Cli, ForwardAnalyticAndSampled) {
    ASSERT_EQ(run("forward --analytic --geometry " + geo + " --out " + p("g")).code, 0);
    ASSERT_EQ(run("phantom --geometry " + geo + " --out " + p("ph")).code, 0);
    ASSERT_EQ(run("forward --in " + p("ph") + " --angles 256 --geometry " + geo + " --out " + p("gs")).code, 0);
    DataField a = read_data(p("g")), b = read_data(p("gs"));
    ASSERT_EQ(a.grid().n_track, b.grid().n_track);
    Config c = Config::load(geo);
    PhantomSpec s;
    s.discs = parse_discs(c.get_string("phantom.discs"));
    EXPECT_EQ(a.values(), project_phantom(s, GeometryConfig::from(c).data).values());
    // pixelated disc against the exact one, coarse
    double num = 0, den = 0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        double d = a.values()[k] - b.values()[k];
        num += d * d;
        den += a.values()[k] * a.values()[k];
    }
    EXPECT_LT(std::sqrt(num / den), 0.1);
    EXPECT_EQ(run("forward --geometry " + geo + " --out " + p("x")).code, 2);
}

TEST_F(Cli, NoiseIsReproducible) {
    ASSERT_EQ(run("forward --analytic --geometry " + geo + " --out " + p("g")).code, 0);
    for (const char* n : {"n1", "n2"})
        ASSERT_EQ(run("noise --in " + p("g") + " --percent 0.1 --seed 7 --out " + p(n)).code, 0);
    ASSERT_EQ(run("noise --in " + p("g") + " --percent 0.1 --seed 8 --out " + p("n3")).code, 0);
    EXPECT_EQ(read_data(p("n1")).values(), read_data(p("n2")).values());
    EXPECT_NE(read_data(p("n1")).values(), read_data(p("n3")).values());
    EXPECT_EQ(run("noise --in " + p("g") + " --percent -1 --out " + p("n4")).code, 2);
}

TEST_F(Cli, InvertFbpMatchesLibrary) {
    ASSERT_EQ(run("forward --analytic --geometry " + geo + " --out " + p("g")).code, 0);
    ASSERT_EQ(run("invert fbp --mode approximate --in " + p("g") + " --geometry " + geo + " --out " + p("f")).code, 0);
    Image f = read_image(p("f"));
    Image ref = invert_fbp(read_data(p("g")), GeometryConfig::from(Config::load(geo)).image, ContinuationMode::approximate);
    EXPECT_EQ(f.values(), ref.values());
    EXPECT_EQ(run("invert fbp --mode sideways --in " + p("g") + " --geometry " + geo + " --out " + p("f2")).code, 2);
    EXPECT_EQ(run("invert fourier --in " + p("g") + " --geometry " + geo + " --out " + p("f3")).code, 0);
}

TEST_F(Cli, CompareReportsMetric) {
    ASSERT_EQ(run("phantom --geometry " + geo + " --out " + p("a")).code, 0);
    CliResult r = run("compare --a " + p("a") + " --b " + p("a") + " --metric l2_relative");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("l2_relative ", 0), 0u) << r.out;
    EXPECT_EQ(std::stod(r.out.substr(12)), 0.0);
    r = run("compare --a " + p("a") + " --b " + p("a") + " --metric plateau_amplitude --region '0 12 5'");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.out.substr(r.out.find(' '))), 10.0, 1e-12);
    EXPECT_EQ(run("compare --a " + p("a") + " --b " + p("a") + " --metric nonsense").code, 2);
}

TEST_F(Cli, NonFiniteInputExitsThree) {
    ASSERT_EQ(run("phantom --geometry " + geo + " --out " + p("a")).code, 0);
    {
        std::fstream f(p("a"), std::ios::in | std::ios::out | std::ios::binary);
        double nan = std::numeric_limits<double>::quiet_NaN();
        f.write(reinterpret_cast<const char*>(&nan), sizeof nan);
    }
    EXPECT_EQ(run("forward --in " + p("a") + " --geometry " + geo + " --out " + p("g")).code, 3);
}

TEST_F(Cli, MissingFileIsValidationError) {
    EXPECT_EQ(run("forward --in " + p("nothing") + " --geometry " + geo + " --out " + p("g")).code, 2);
}

TEST_F(Cli, GhostSingleAndBatch) {
    std::ofstream(p("unit.ini")) << "[geometry]\nnx = 33\nny = 17\ndx = 0.0625\ndy = 0.0625\nx0 = -1\ny0 = 0\nL = 1\nR = 1\n";
    ASSERT_EQ(run("ghost --family even --a 2 --l 1 --subtract-baseline --geometry " + p("unit.ini") + " --out " + p("gh")).code, 0);
    EXPECT_EQ(read_image(p("gh")).grid().nx, 33u);
    std::ofstream(p("batch.csv")) << "family,a,b_or_l\neven,2,1\nodd,2,1\n";
    CliResult r = run("ghost --batch " + p("batch.csv") + " --subtract-baseline --geometry " + p("unit.ini") + " --out " + p("many"));
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(p("many/ghost_0")));
    EXPECT_TRUE(fs::exists(p("many/ghost_1")));
    EXPECT_EQ(run("ghost --family sideways --a 1 --geometry " + p("unit.ini") + " --out " + p("x")).code, 2);
    EXPECT_EQ(run("ghost --family even --a 1 --l 1.5 --geometry " + p("unit.ini") + " --out " + p("x")).code, 2);
}

TEST_F(Cli, LrResolveRecoversPhantom) {
    std::ofstream(p("lr.ini")) << "[geometry]\nnx = 32\nny = 64\nx0 = 0\ny0 = -32\n";
    ASSERT_EQ(run("phantom --geometry " + p("lr.ini") + " --discs '16 9 5 1' --out " + p("ph")).code, 0);
    ASSERT_EQ(run("lr resolve --phantom " + p("ph") + " --positions 0,1,3 --mode direct --resolver exact --out " + p("res") +
                  " --emit-intermediates " + p("ev"))
                  .code,
              0);
    EXPECT_LT(compare(read_image(p("res")), read_image(p("ph")), MetricKind::linf), 1e-6);
    EXPECT_TRUE(fs::exists(p("ev/even_3")));
    EXPECT_EQ(run("lr resolve --phantom " + p("ph") + " --positions 1,2 --out " + p("r2")).code, 2);
    EXPECT_EQ(run("lr resolve --phantom " + p("ph") + " --positions 0,2,4 --out " + p("r3")).code, 2);
}

TEST_F(Cli, ScenarioListAndBadName) {
    CliResult r = run("scenario list");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "ch2_ladder\nch3_ghost_sweep\nch4_ortho\nch5_antenna_sweep\n");
    EXPECT_EQ(run("scenario run nope --out " + p("s")).code, 2);
}
