#pragma once

#include <map>
#include <string>
#include <vector>

#include "sart/grid.hpp"

namespace sart {

// INI-style key/value configuration. Keys are addressed as "section.key".
class Config {
public:
    static Config load(const std::string& path);
    static Config parse(const std::string& text);

    // "section.key=value"; adds or replaces.
    void set(const std::string& key, const std::string& value);
    void apply_overrides(const std::vector<std::string>& assignments);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma separated.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<long> get_longs(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    // All entries of a section (key -> value), sorted by key.
    std::map<std::string, std::string> section(const std::string& name) const;
    // Canonical text form; identical configs give identical text.
    std::string dump() const;

private:
    std::map<std::string, std::string> kv_;
};

struct GeometryConfig {
    ImageGrid image;
    DataGrid data;
    double L = 0.0, R = 0.0;
    double extent = 1.0;  // multiplier of the data area

    void validate() const;
    // [geometry] nx ny dx dy x0 y0 track_begin track_end radius_end L R
    // extent. The half-open track and radius ranges are scaled by
    // sqrt(extent).
    static GeometryConfig from(const Config& c, const std::string& section = "geometry");
};

// "xc yc radius amplitude; ..." and "xc yc sigma amplitude [mirrored]; ...".
std::vector<Disc> parse_discs(const std::string& text);
std::vector<GaussianBlob> parse_blobs(const std::string& text);

}  // namespace sart
