#pragma once

#include <string>
#include <vector>

#include "sart/config.hpp"

namespace sart {

struct MetricRow {
    std::string stage, metric;
    double value = 0.0;
};

struct ScenarioReport {
    std::string name;
    std::vector<MetricRow> metrics;
    std::vector<std::string> files;  // relative to the output directory
};

std::vector<std::string> scenario_names();

// Runs a named scenario with a fully resolved config and writes its files
// (images, PGM renders, profiles, metrics.csv) below out_dir.
ScenarioReport run_scenario(const std::string& name, const Config& cfg, const std::string& out_dir);

// Loads <config_dir>/<name>.ini, applies the [smoke] section when asked,
// then the explicit overrides.
Config scenario_config(const std::string& name, const std::string& config_dir, bool smoke,
                       const std::vector<std::string>& overrides);

// Metrics CSV text: config lines as comments, then scenario,stage,metric,value.
std::string metrics_csv(const ScenarioReport& r, const Config& cfg);

// Fixed formatting for metric values.
std::string format_metric(double v);

}  // namespace sart
