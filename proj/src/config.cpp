#include "powvar/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "powvar/rng.hpp"

namespace powvar {

namespace toml {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& raw, int line_no) {
    const std::string text = trim(raw);
    if (text.empty()) throw ConfigError(line_no, "missing value");
    Value value;
    value.line = line_no;
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ConfigError(line_no, "unterminated string");
        value.kind = Value::Kind::String;
        value.string = text.substr(1, text.size() - 2);
        return value;
    }
    if (text == "true" || text == "false") {
        value.kind = Value::Kind::Boolean;
        value.boolean = text == "true";
        return value;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(line_no, "unterminated array");
        value.kind = Value::Kind::NumberList;
        std::stringstream ss(text.substr(1, text.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string entry = trim(item);
            if (entry.empty()) continue;
            try {
                std::size_t used = 0;
                value.list.push_back(std::stod(entry, &used));
                if (used != entry.size()) throw std::invalid_argument(entry);
            } catch (const std::exception&) {
                throw ConfigError(line_no, "bad number '" + entry + "' in array");
            }
        }
        return value;
    }
    try {
        std::size_t used = 0;
        value.number = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ConfigError(line_no, "bad value '" + text + "'");
    }
    value.kind = Value::Kind::Number;
    return value;
}

}  // namespace

const Value* Table::find(const std::string& key) const {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

double Table::number(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw ConfigError(line, "missing key '" + key + "'");
    if (v->kind != Value::Kind::Number) throw ConfigError(v->line, "'" + key + "' must be a number");
    return v->number;
}

double Table::number_or(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Number) throw ConfigError(v->line, "'" + key + "' must be a number");
    return v->number;
}

std::string Table::string(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw ConfigError(line, "missing key '" + key + "'");
    if (v->kind != Value::Kind::String) throw ConfigError(v->line, "'" + key + "' must be a string");
    return v->string;
}

std::string Table::string_or(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::String) throw ConfigError(v->line, "'" + key + "' must be a string");
    return v->string;
}

std::vector<double> Table::list(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw ConfigError(line, "missing key '" + key + "'");
    if (v->kind != Value::Kind::NumberList)
        throw ConfigError(v->line, "'" + key + "' must be an array of numbers");
    return v->list;
}

Document parse(const std::string& text) {
    Document doc;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    std::string prefix;          // current table path ("" = root)
    Table* current = &doc.root;  // where keys land
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.rfind("[[", 0) == 0) {
            if (line.size() < 5 || line.substr(line.size() - 2) != "]]")
                throw ConfigError(line_no, "malformed table-array header");
            const std::string name = trim(line.substr(2, line.size() - 4));
            if (name != "experiment")
                throw ConfigError(line_no, "unknown table array '" + name + "' (only [[experiment]])");
            doc.experiments.emplace_back();
            doc.experiments.back().line = line_no;
            current = &doc.experiments.back();
            prefix = "";
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "malformed table header");
            prefix = trim(line.substr(1, line.size() - 2));
            if (prefix.empty()) throw ConfigError(line_no, "empty table name");
            current = &doc.root;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (current->values.count(full)) throw ConfigError(line_no, "duplicate key '" + full + "'");
        current->values.emplace(full, parse_value(line.substr(eq + 1), line_no));
    }
    return doc;
}

}  // namespace toml

namespace {

ModelSpec model_from(const toml::Table& root) {
    ModelSpec model;
    model.x0 = root.number_or("model.x0", 0.0);

    const std::string drift_kind = root.string_or("model.drift.kind", "constant");
    if (drift_kind == "constant") {
        model.drift = DriftSpec::constant(root.number_or("model.drift.value", 0.0));
    } else if (drift_kind == "sine") {
        model.drift.kind = DriftKind::Sine;
        model.drift.level = root.number_or("model.drift.value", 0.0);
        model.drift.amplitude = root.number_or("model.drift.amplitude", 0.0);
        model.drift.frequency = root.number_or("model.drift.frequency", 1.0);
    } else {
        throw ConfigError(root.line, "unknown drift kind '" + drift_kind + "'");
    }

    const std::string vol_kind = root.string_or("model.vol.kind", "constant");
    if (vol_kind == "constant") {
        model.vol = VolSpec::constant(root.number_or("model.vol.sigma0", 1.0));
    } else if (vol_kind == "ou" || vol_kind == "ou_jump") {
        model.vol = VolSpec::exp_ou(root.number_or("model.vol.sigma0", 1.0),
                                    root.number_or("model.vol.mean_reversion", 1.0),
                                    root.number_or("model.vol.vol_of_vol", 0.5),
                                    root.number_or("model.vol.leverage", 0.0));
        if (vol_kind == "ou_jump") {
            model.vol.kind = VolKind::ExpOuJump;
            model.vol.jump_zeta = root.number_or("model.vol.jump_zeta", 0.0);
        }
    } else {
        throw ConfigError(root.line, "unknown vol kind '" + vol_kind + "'");
    }

    const std::string jump_kind = root.string_or("model.jumps.kind", "none");
    if (jump_kind == "none") {
        model.jumps = JumpSpec::none();
    } else if (jump_kind == "compound_poisson") {
        JumpSizeSpec size;
        const std::string size_kind = root.string_or("model.jumps.size", "fixed");
        if (size_kind == "fixed") {
            size = JumpSizeSpec::fixed(root.number_or("model.jumps.a", 1.0));
        } else if (size_kind == "gaussian") {
            size = JumpSizeSpec::gaussian(root.number_or("model.jumps.mean", 0.0),
                                          root.number_or("model.jumps.var", 1.0));
        } else if (size_kind == "double_exponential") {
            size = JumpSizeSpec::double_exponential(root.number_or("model.jumps.eta_plus", 1.0),
                                                    root.number_or("model.jumps.eta_minus", 1.0));
        } else {
            throw ConfigError(root.line, "unknown jump size kind '" + size_kind + "'");
        }
        model.jumps = JumpSpec::compound_poisson(root.number("model.jumps.rate"), size);
    } else if (jump_kind == "stable_like") {
        const std::string policy = root.string_or("model.jumps.cutoff", "discard");
        if (policy != "discard" && policy != "gaussian")
            throw ConfigError(root.line, "cutoff policy must be 'discard' or 'gaussian'");
        model.jumps = JumpSpec::stable_like(root.number("model.jumps.beta"),
                                            root.number("model.jumps.scale"),
                                            policy == "discard" ? SmallJumpPolicy::Discard
                                                                : SmallJumpPolicy::GaussianSubstitute);
        model.jumps.cutoff_override = root.number_or("model.jumps.cutoff_eps", 0.0);
    } else {
        throw ConfigError(root.line, "unknown jump kind '" + jump_kind + "'");
    }
    return model;
}

Functional functional_from(const toml::Table& table, const std::string& suffix) {
    const std::string thm_name = table.string("theorem" + suffix);
    const auto thm = theorem_from_name(thm_name);
    if (!thm) throw ConfigError(table.line, "unknown theorem '" + thm_name + "'");
    Functional fn;
    fn.theorem = *thm;
    if (const auto* fv = table.find("f" + suffix)) {
        if (fv->kind != toml::Value::Kind::String) throw ConfigError(fv->line, "'f' must be a string");
        try {
            fn.f = TestFunction::parse(fv->string);
        } catch (const std::exception& e) {
            throw ConfigError(fv->line, e.what());
        }
    }
    if (table.find("varpi" + suffix)) {
        TruncationSpec trunc;
        trunc.varpi = table.number("varpi" + suffix);
        trunc.alpha = table.number_or("alpha" + suffix, 1.0);
        fn.trunc = trunc;
    }
    if (table.find("psi_eta" + suffix)) fn.psi_eta = table.number("psi_eta" + suffix);
    return fn;
}

std::vector<double> ladder_from(const toml::Table& table) {
    std::vector<double> ladder;
    if (table.find("ladder_exponents")) {
        for (double e : table.list("ladder_exponents")) ladder.push_back(std::pow(2.0, e));
    } else if (table.find("delta_exponent")) {
        ladder.push_back(std::pow(2.0, table.number("delta_exponent")));
    } else if (table.find("delta_ladder")) {
        ladder = table.list("delta_ladder");
    } else if (table.find("delta_n")) {
        ladder.push_back(table.number("delta_n"));
    } else {
        throw ConfigError(table.line,
                          "experiment needs delta_n, delta_exponent, delta_ladder or ladder_exponents");
    }
    std::sort(ladder.begin(), ladder.end(), std::greater<double>());
    return ladder;
}

Bands bands_from(const toml::Table& table) {
    Bands bands;
    if (table.find("max_rel_err")) bands.max_rel_err = table.number("max_rel_err");
    if (table.find("slope_band")) {
        const auto band = table.list("slope_band");
        if (band.size() != 2) throw ConfigError(table.line, "slope_band must have two entries");
        bands.slope_band = {band[0], band[1]};
    }
    if (table.find("var_band")) {
        const auto band = table.list("var_band");
        if (band.size() != 2) throw ConfigError(table.line, "var_band must have two entries");
        bands.var_band = {band[0], band[1]};
    }
    if (table.find("min_ks_p")) bands.min_ks_p = table.number("min_ks_p");
    if (table.find("cov_se_multiple")) bands.cov_se_multiple = table.number("cov_se_multiple");
    return bands;
}

}  // namespace

Config parse_config(const std::string& text) {
    const toml::Document doc = toml::parse(text);
    Config config;
    config.model = model_from(doc.root);
    config.horizon = doc.root.number_or("sampling.horizon", 1.0);
    config.refine = static_cast<int>(doc.root.number_or("sampling.refine", 8));
    config.seed = static_cast<std::uint64_t>(doc.root.number_or("seed", 1));
    config.out_dir = doc.root.string_or("out", "out");

    std::size_t index = 0;
    for (const toml::Table& table : doc.experiments) {
        Experiment exp;
        const std::string kind = table.string("kind");
        if (kind == "lln") exp.kind = ExperimentKind::Lln;
        else if (kind == "clt") exp.kind = ExperimentKind::Clt;
        else if (kind == "cov") exp.kind = ExperimentKind::Cov;
        else throw ConfigError(table.line, "unknown experiment kind '" + kind + "'");

        ExperimentPlan& plan = exp.plan;
        plan.name = table.string_or("name", "experiment_" + std::to_string(index));
        plan.model = config.model;
        plan.horizon = config.horizon;
        plan.refine = config.refine;
        plan.t_eval = table.number_or("t_eval", config.horizon);
        plan.replicates = static_cast<std::size_t>(table.number_or("replicates", 200));
        plan.delta_ladder = ladder_from(table);
        plan.base_seed = derive_seed(config.seed, 1000 + index);
        plan.bands = bands_from(table);
        if (const auto* fv = table.find("feasible")) {
            if (fv->kind != toml::Value::Kind::Boolean)
                throw ConfigError(fv->line, "'feasible' must be true or false");
            plan.feasible_variance = fv->boolean;
        }
        plan.functionals.push_back(functional_from(table, ""));
        if (exp.kind == ExperimentKind::Cov) plan.functionals.push_back(functional_from(table, "2"));

        const auto problems = plan.validate();
        if (!problems.empty()) throw ConfigError(table.line, plan.name + ": " + problems.front());
        config.experiments.push_back(std::move(exp));
        ++index;
    }
    return config;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace powvar
