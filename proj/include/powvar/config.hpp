#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powvar/harness.hpp"
#include "powvar/model.hpp"

namespace powvar {

struct ConfigError : std::runtime_error {
    ConfigError(int line_, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_) + ": " + message), line(line_) {}
    int line;
};

namespace toml {

struct Value {
    enum class Kind { Number, String, Boolean, NumberList } kind = Kind::Number;
    double number = 0.0;
    std::string string;
    bool boolean = false;
    std::vector<double> list;
    int line = 0;
};

struct Table {
    std::map<std::string, Value> values;  // keys relative to the table
    int line = 0;

    const Value* find(const std::string& key) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string string(const std::string& key) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> list(const std::string& key) const;
};

// TOML subset: [table] headers (dotted), [[experiment]] array-of-tables,
// key = number | "string" | true/false | [numbers], # comments.
struct Document {
    Table root;  // dotted keys, e.g. "model.vol.sigma0"
    std::vector<Table> experiments;
};

Document parse(const std::string& text);

}  // namespace toml

enum class ExperimentKind { Lln, Clt, Cov };

struct Experiment {
    ExperimentKind kind;
    ExperimentPlan plan;
};

struct Config {
    ModelSpec model;
    double horizon = 1.0;
    int refine = 8;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::vector<Experiment> experiments;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

}  // namespace powvar
