#pragma once

#include <string>
#include <vector>

#include "powvar/config.hpp"
#include "powvar/functionals.hpp"
#include "powvar/harness.hpp"
#include "powvar/simulate.hpp"

#include <json.hpp>

namespace powvar {

using Json = nlohmann::ordered_json;

Json plan_echo(const Experiment& exp);
Json report_json(const TheoremReport& report);
Json report_json(const CovarianceReport& report);

// Full run report: schema "powvar-report/1", plan echoes + per-experiment
// results, byte-stable for identical inputs.
struct RunOutcome {
    Json document;
    bool all_bands_pass = true;
    bool any_refusal = false;
    std::vector<std::string> refusal_messages;
};

// Writes content to path via temp file + rename.
void write_atomic(const std::string& path, const std::string& content);

// CSV dumps
void write_path_csv(const std::string& path, const PathBundle& bundle);
void write_jumps_csv(const std::string& path, const PathBundle& bundle);
std::string functional_series_csv(const FunctionalSeries& series);
std::string rate_plot_csv(const Json& report_doc, const std::string& experiment_name);
std::string rungs_csv(const Json& report_doc);

}  // namespace powvar
