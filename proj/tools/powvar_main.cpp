#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "powvar/config.hpp"
#include "powvar/harness.hpp"
#include "powvar/report.hpp"
#include "powvar/rng.hpp"

namespace fs = std::filesystem;
using namespace powvar;

namespace {

constexpr int kExitBandFail = 1;
constexpr int kExitRefusal = 2;
constexpr int kExitUsage = 64;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    unsigned jobs = 1;
};

Config load_with_overrides(const CommonOptions& opt) {
    Config config = load_config(opt.config_path);
    if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
    if (opt.seed) {
        config.seed = *opt.seed;
        std::size_t index = 0;
        for (Experiment& exp : config.experiments)
            exp.plan.base_seed = derive_seed(config.seed, 1000 + index++);
    }
    for (Experiment& exp : config.experiments) {
        if (opt.replicates) exp.plan.replicates = *opt.replicates;
        exp.plan.jobs = opt.jobs;
    }
    return config;
}

Json run_header(const Config& config) {
    Json doc;
    doc["schema"] = "powvar-report/1";
    doc["seed"] = config.seed;
    return doc;
}

int run_experiments(const CommonOptions& opt, ExperimentKind kind, const std::string& report_name) {
    const Config config = load_with_overrides(opt);
    fs::create_directories(config.out_dir);

    Json doc = run_header(config);
    Json experiments = Json::array();
    bool any_band_fail = false;
    bool any_refusal = false;
    std::size_t n_run = 0;
    for (const Experiment& exp : config.experiments) {
        if (exp.kind != kind) continue;
        ++n_run;
        Json entry;
        entry["plan"] = plan_echo(exp);
        if (kind == ExperimentKind::Cov) {
            const CovarianceReport report = run_covariance_pair(exp.plan);
            entry["result"] = report_json(report);
            if (!report.admissible) {
                any_refusal = true;
                std::cerr << "refused: " << report.refusal << "\n";
            } else if (report.bands_checked && !report.bands_pass) {
                any_band_fail = true;
                for (const auto& f : report.band_failures)
                    std::cerr << exp.plan.name << ": " << f << "\n";
            }
        } else {
            const TheoremReport report =
                kind == ExperimentKind::Lln ? run_lln(exp.plan) : run_clt(exp.plan);
            entry["result"] = report_json(report);
            if (!report.admissible) {
                any_refusal = true;
                std::cerr << "refused: " << report.refusal << "\n";
            } else if (report.bands_checked && !report.bands_pass) {
                any_band_fail = true;
                for (const auto& f : report.band_failures)
                    std::cerr << exp.plan.name << ": " << f << "\n";
            }
        }
        experiments.push_back(entry);
    }
    doc["experiments"] = experiments;

    const fs::path report_path = fs::path(config.out_dir) / report_name;
    write_atomic(report_path.string(), doc.dump(2) + "\n");
    const fs::path csv_path = fs::path(config.out_dir) / (report_name + ".rungs.csv");
    write_atomic(csv_path.string(), rungs_csv(doc));
    std::cout << "wrote " << report_path.string() << " (" << n_run << " experiment(s))\n";

    if (any_refusal) return kExitRefusal;
    if (any_band_fail) return kExitBandFail;
    return 0;
}

int cmd_simulate(const CommonOptions& opt, std::size_t n_paths, bool dump) {
    const Config config = load_with_overrides(opt);
    if (n_paths == 0) {
        std::cerr << "warning: --paths 0, nothing to simulate\n";
        return 0;
    }
    fs::create_directories(config.out_dir);
    SamplingSpec sampling;
    sampling.horizon = config.horizon;
    sampling.refine = config.refine;
    sampling.delta_n = config.experiments.empty()
                           ? config.horizon / 256.0
                           : config.experiments.front().plan.delta_ladder.back();
    for (std::size_t k = 0; k < n_paths; ++k) {
        const PathBundle path = simulate_path(config.model, sampling, derive_seed(config.seed, k));
        if (dump) {
            const fs::path base = fs::path(config.out_dir);
            write_path_csv((base / ("path_" + std::to_string(k) + ".csv")).string(), path);
            write_jumps_csv((base / ("jumps_" + std::to_string(k) + ".csv")).string(), path);
        }
        std::cout << "path " << k << ": x(T) = " << path.x.back() << ", jumps = " << path.jumps.size()
                  << "\n";
    }
    return 0;
}

int cmd_rate_plot(const std::string& report_path, const std::string& out_dir,
                  const std::string& experiment_name) {
    std::ifstream in(report_path);
    if (!in) {
        std::cerr << "cannot open report '" << report_path << "'\n";
        return kExitUsage;
    }
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        std::cerr << "bad report JSON: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const std::string csv = rate_plot_csv(doc, experiment_name);
        fs::create_directories(out_dir);
        const fs::path out = fs::path(out_dir) / "rate_plot.csv";
        write_atomic(out.string(), csv);
        std::cout << "wrote " << out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
}

void cmd_list_theorems() {
    struct Row {
        const char* tag;
        const char* what;
    };
    static const Row rows[] = {
        {"T1a", "V^n(f) -> f*mu for f small near 0 (no assumptions)"},
        {"T1b", "V^n(f) -> f*mu + C for f ~ x^2 at 0"},
        {"T1c", "V^n(f) -> f*mu + var(drift) for f ~ |x| at 0, sigma = 0"},
        {"T2", "V^n(f) - compensator -> Sigma(f,psi_eta), f in E''_r, r in (1,2); Levy models"},
        {"T3i", "Delta V'^n(g) -> int rho_sigma(g) du"},
        {"T3ii", "Delta^{1-r/2} V^n(f) -> m_r int c^{r/2} du, r in (0,2)"},
        {"T3iii", "truncated variance -> C_t for varpi in (0,1/2)"},
        {"T4", "CLT for V^n(f) - compensator, f ~ |x| at 0; variance (1-2/pi) int c du; Levy models"},
        {"T5", "CLT for Delta V'^n(g), g even C2_b; needs s <= 1"},
        {"T6", "CLT for Delta^{1-r/2} V^n(f), f in E_r, r in (0,1]; region in (s, r)"},
        {"T6p", "CLT for truncated variance; needs s <= (4*varpi - 1)/(2*varpi); variance 2 int c^2 du"},
        {"T7i", "CLT for V^n(f) - V(f), f smooth with f''(x) = o(|x|): jump limit Z(f')"},
        {"T7ii", "CLT for V^n(f) - V(f), f in E_2: Z(f') + sqrt(2) int c dW"},
    };
    for (const Row& row : rows) std::cout << row.tag << "  " << row.what << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"powvar: realized power variation laboratory"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "experiment config (TOML)")->required();
        cmd->add_option("--out", opt.out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", opt.seed, "base seed (overrides config)");
        cmd->add_option("--replicates", opt.replicates, "replicates per experiment (override)");
        cmd->add_option("--jobs", opt.jobs, "worker threads (result-invariant)")->default_val(1);
    };

    auto* sim = app.add_subcommand("simulate", "simulate paths and optionally dump CSV");
    std::size_t n_paths = 1;
    bool dump = false;
    add_common(sim);
    sim->add_option("--paths", n_paths, "number of paths")->default_val(1);
    sim->add_flag("--dump", dump, "write path/jump CSV files");

    auto* lln = app.add_subcommand("lln", "run the LLN experiment blocks");
    add_common(lln);
    auto* clt = app.add_subcommand("clt", "run the CLT experiment blocks");
    add_common(clt);
    auto* cov = app.add_subcommand("cov", "run the covariance-pair experiment blocks");
    add_common(cov);

    auto* rate = app.add_subcommand("rate-plot", "emit plot CSV from a report JSON");
    std::string report_path, rate_out = "out", experiment_name;
    rate->add_option("--report", report_path, "report JSON path")->required();
    rate->add_option("--out", rate_out, "output directory");
    rate->add_option("--experiment", experiment_name, "experiment name (default: first with a rate fit)");

    auto* list = app.add_subcommand("list-theorems", "list supported theorem tags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opt, n_paths, dump);
        if (lln->parsed()) return run_experiments(opt, ExperimentKind::Lln, "report_lln.json");
        if (clt->parsed()) return run_experiments(opt, ExperimentKind::Clt, "report_clt.json");
        if (cov->parsed()) return run_experiments(opt, ExperimentKind::Cov, "report_cov.json");
        if (rate->parsed()) return cmd_rate_plot(report_path, rate_out, experiment_name);
        if (list->parsed()) {
            cmd_list_theorems();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const AdmissibilityError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitRefusal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
