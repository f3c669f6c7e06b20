#include "sart/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sart/error.hpp"

namespace sart {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ValidationError("config key '" + key + "': not a number: '" + v + "'");
}

long to_long(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d != std::round(d)) throw ValidationError("config key '" + key + "': not an integer: '" + v + "'");
    return static_cast<long>(d);
}

Config from_ptree(const boost::property_tree::ptree& pt) {
    Config c;
    for (const auto& [sec, tree] : pt) {
        if (tree.empty()) {
            c.set(sec, tree.data());
            continue;
        }
        for (const auto& [k, v] : tree) c.set(sec + "." + k, v.data());
    }
    return c;
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

Config Config::parse(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    return from_ptree(pt);
}

void Config::set(const std::string& key, const std::string& value) { kv_[trim(key)] = trim(value); }

void Config::apply_overrides(const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("override must be section.key=value: '" + a + "'");
        set(a.substr(0, eq), a.substr(eq + 1));
    }
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ValidationError("config key '" + key + "' missing");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(key, get_string(key)); }
double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
long Config::get_long(const std::string& key) const { return to_long(key, get_string(key)); }
long Config::get_long(const std::string& key, long fallback) const { return has(key) ? get_long(key) : fallback; }

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ValidationError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split(get_string(key), ',')) out.push_back(to_double(key, s));
    return out;
}

std::vector<long> Config::get_longs(const std::string& key) const {
    std::vector<long> out;
    for (const auto& s : split(get_string(key), ',')) out.push_back(to_long(key, s));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key) const { return split(get_string(key), ','); }

std::map<std::string, std::string> Config::section(const std::string& name) const {
    std::map<std::string, std::string> out;
    const std::string pre = name + ".";
    for (const auto& [k, v] : kv_)
        if (k.compare(0, pre.size(), pre) == 0) out[k.substr(pre.size())] = v;
    return out;
}

std::string Config::dump() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << '=' << v << '\n';
    return os.str();
}

void GeometryConfig::validate() const {
    image.validate();
    data.validate();
    if (L < 0.0 || R < 0.0) throw ValidationError("L and R must be nonnegative");
    if (!(extent >= 1.0)) throw ValidationError("extent multiplier must be >= 1");
}

GeometryConfig GeometryConfig::from(const Config& c, const std::string& s) {
    GeometryConfig g;
    g.image.nx = static_cast<std::size_t>(c.get_long(s + ".nx"));
    g.image.ny = static_cast<std::size_t>(c.get_long(s + ".ny"));
    g.image.dx = c.get_double(s + ".dx", 1.0);
    g.image.dy = c.get_double(s + ".dy", 1.0);
    g.image.x0 = c.get_double(s + ".x0", 0.0);
    g.image.y0 = c.get_double(s + ".y0", 0.0);
    g.extent = c.get_double(s + ".extent", 1.0);
    double k = std::sqrt(g.extent);
    double dt = c.get_double(s + ".d_track", g.image.dx), dr = c.get_double(s + ".d_radius", g.image.dy);
    // half-open ranges [track_begin, track_end) and [0, radius_end), scaled by k
    double tb = c.get_double(s + ".track_begin", g.image.x0);
    double te = c.get_double(s + ".track_end", g.image.x_max() + g.image.dx);
    double re = c.get_double(s + ".radius_end", std::max(std::abs(g.image.y0), std::abs(g.image.y_max())) + g.image.dy);
    auto snap = [](double v, double h) { return std::round(v / h) * h; };
    g.data = DataGrid::make(snap(tb * k, dt), snap(te * k, dt) - dt, snap(re * k, dr) - dr, dt, dr);
    g.L = c.get_double(s + ".L", 0.0);
    g.R = c.get_double(s + ".R", 0.0);
    g.validate();
    return g;
}

std::vector<Disc> parse_discs(const std::string& text) {
    std::vector<Disc> out;
    for (const auto& item : split(text, ';')) {
        std::istringstream is(item);
        Disc d;
        if (!(is >> d.xc >> d.yc >> d.radius >> d.amplitude)) throw ValidationError("bad disc '" + item + "'");
        out.push_back(d);
    }
    return out;
}

std::vector<GaussianBlob> parse_blobs(const std::string& text) {
    std::vector<GaussianBlob> out;
    for (const auto& item : split(text, ';')) {
        std::istringstream is(item);
        GaussianBlob b;
        if (!(is >> b.xc >> b.yc >> b.sigma >> b.amplitude)) throw ValidationError("bad blob '" + item + "'");
        std::string flag;
        if (is >> flag) b.mirrored = flag == "mirrored";
        out.push_back(b);
    }
    return out;
}

}  // namespace sart
