#include "powvar/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace powvar {

namespace {

Json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Lln: return "lln";
        case ExperimentKind::Clt: return "clt";
        case ExperimentKind::Cov: return "cov";
    }
    return "?";
}

}  // namespace

Json plan_echo(const Experiment& exp) {
    const ExperimentPlan& plan = exp.plan;
    Json j;
    j["name"] = plan.name;
    j["kind"] = kind_name(exp.kind);
    Json fns = Json::array();
    for (const Functional& fn : plan.functionals) {
        Json f;
        f["theorem"] = theorem_name(fn.theorem);
        if (fn.f) f["f"] = fn.f->name();
        if (fn.trunc) {
            f["varpi"] = fn.trunc->varpi;
            f["alpha"] = fn.trunc->alpha;
        }
        if (!std::isinf(fn.psi_eta)) f["psi_eta"] = fn.psi_eta;
        fns.push_back(f);
    }
    j["functionals"] = fns;
    j["delta_ladder"] = plan.delta_ladder;
    j["refine"] = plan.refine;
    j["horizon"] = plan.horizon;
    j["t_eval"] = plan.t_eval;
    j["replicates"] = plan.replicates;
    j["base_seed"] = plan.base_seed;
    if (plan.feasible_variance) j["feasible_variance"] = true;  // experimental mode
    return j;
}

Json report_json(const TheoremReport& report) {
    Json j;
    j["label"] = report.label;
    j["admissible"] = report.admissible;
    if (!report.admissible) {
        j["refusal"] = report.refusal;
        j["degenerate_exponent"] = finite_or_null(report.degenerate_exponent);
        return j;
    }
    Json rungs = Json::array();
    for (const RungReport& r : report.rungs) {
        Json jr;
        jr["delta_n"] = r.delta_n;
        jr["mean_error"] = r.mean_error;
        jr["rmse"] = r.rmse;
        jr["mean_limit"] = r.mean_limit;
        jr["mean_statistic"] = r.mean_statistic;
        rungs.push_back(jr);
    }
    j["rungs"] = rungs;
    if (report.rate) {
        Json rate;
        rate["slope"] = report.rate->slope;
        rate["slope_stderr"] = report.rate->slope_stderr;
        rate["intercept"] = report.rate->intercept;
        rate["degenerate"] = report.rate->degenerate;
        j["rate"] = rate;
    }
    if (report.clt) {
        Json clt;
        clt["m"] = report.clt->m;
        clt["z_mean"] = report.clt->z_mean;
        clt["z_variance"] = report.clt->z_variance;
        clt["ks_distance"] = report.clt->ks_distance;
        clt["ks_p"] = report.clt->ks_p;
        clt["mean_limit"] = report.clt->mean_limit;
        clt["mean_variance"] = report.clt->mean_variance;
        j["clt"] = clt;
    }
    if (report.bands_checked) {
        j["bands_pass"] = report.bands_pass;
        j["band_failures"] = report.band_failures;
    }
    return j;
}

Json report_json(const CovarianceReport& report) {
    Json j;
    j["label_j"] = report.label_j;
    j["label_k"] = report.label_k;
    j["admissible"] = report.admissible;
    if (!report.admissible) {
        j["refusal"] = report.refusal;
        return j;
    }
    j["m"] = report.m;
    j["empirical_cov"] = report.empirical_cov;
    j["theoretical_cov"] = report.theoretical_cov;
    j["standard_error"] = report.standard_error;
    j["empirical_var_j"] = report.empirical_var_j;
    j["empirical_var_k"] = report.empirical_var_k;
    j["theoretical_var_j"] = report.theoretical_var_j;
    j["theoretical_var_k"] = report.theoretical_var_k;
    if (report.bands_checked) {
        j["bands_pass"] = report.bands_pass;
        j["band_failures"] = report.band_failures;
    }
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out.good()) throw std::runtime_error("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

void write_path_csv(const std::string& path, const PathBundle& bundle) {
    std::ostringstream os;
    os.precision(17);
    os << "t,x,c\n";
    for (std::size_t i = 0; i < bundle.grid.size(); ++i)
        os << bundle.grid[i] << "," << bundle.x[i] << "," << bundle.c[i] << "\n";
    write_atomic(path, os.str());
}

void write_jumps_csv(const std::string& path, const PathBundle& bundle) {
    std::ostringstream os;
    os.precision(17);
    os << "t,dx,c_left,c_right\n";
    for (const JumpRecordEntry& jump : bundle.jumps)
        os << jump.time << "," << jump.size << "," << jump.c_left << "," << jump.c_right << "\n";
    write_atomic(path, os.str());
}

std::string functional_series_csv(const FunctionalSeries& series) {
    std::ostringstream os;
    os.precision(17);
    os << "time,value\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        os << series.times[i] << "," << series.values[i] << "\n";
    return os.str();
}

std::string rate_plot_csv(const Json& report_doc, const std::string& experiment_name) {
    if (!report_doc.contains("experiments"))
        throw std::runtime_error("report has no experiments section");
    for (const Json& exp : report_doc["experiments"]) {
        if (!experiment_name.empty() && exp["plan"]["name"] != experiment_name) continue;
        const Json& result = exp["result"];
        if (!result.contains("rungs") || !result.contains("rate"))
            throw std::runtime_error("experiment has no rate section");
        if (result["rungs"].size() < 2) throw std::runtime_error(">= 2 rungs required");
        const double slope = result["rate"]["slope"];
        const double intercept = result["rate"]["intercept"];
        std::ostringstream os;
        os.precision(17);
        os << "log2_delta_n,log2_rmse,fit\n";
        for (const Json& rung : result["rungs"]) {
            const double delta = rung["delta_n"].get<double>();
            const double rmse = rung["rmse"].get<double>();
            // fit lives in the log2(1/delta) convention of the slope
            os << std::log2(delta) << "," << (rmse > 0.0 ? std::log2(rmse) : std::nan("")) << ","
               << intercept + slope * std::log2(1.0 / delta) << "\n";
        }
        return os.str();
    }
    throw std::runtime_error("no experiment named '" + experiment_name + "' with a rate section");
}

std::string rungs_csv(const Json& report_doc) {
    std::ostringstream os;
    os.precision(17);
    os << "experiment,delta_n,mean_error,rmse,mean_limit,mean_statistic\n";
    if (report_doc.contains("experiments")) {
        for (const Json& exp : report_doc["experiments"]) {
            const Json& result = exp["result"];
            if (!result.contains("rungs")) continue;
            for (const Json& rung : result["rungs"]) {
                os << exp["plan"]["name"].get<std::string>() << "," << rung["delta_n"].get<double>()
                   << "," << rung["mean_error"].get<double>() << "," << rung["rmse"].get<double>()
                   << "," << rung["mean_limit"].get<double>() << ","
                   << rung["mean_statistic"].get<double>() << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace powvar
