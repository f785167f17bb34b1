#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powvar/limits.hpp"
#include "powvar/model.hpp"
#include "powvar/stats.hpp"

namespace powvar {

// Pass/fail bands a plan may pin; unset bands are not checked.
struct Bands {
    std::optional<double> max_rel_err;                      // |mean error| / |mean limit| at finest rung
    std::optional<std::pair<double, double>> slope_band;    // fitted log2 RMSE slope
    std::optional<std::pair<double, double>> var_band;      // empirical variance of z
    std::optional<double> min_ks_p;
    std::optional<double> cov_se_multiple;                  // |cov - target| <= k * SE
};

struct ExperimentPlan {
    std::string name;
    ModelSpec model;
    std::vector<Functional> functionals;  // one for lln/clt, two for cov
    std::vector<double> delta_ladder;     // strictly decreasing
    int refine = 8;                       // fine substeps per smallest ladder step
    double horizon = 1.0;
    double t_eval = 1.0;
    std::size_t replicates = 200;
    std::uint64_t base_seed = 1;
    unsigned jobs = 1;
    Bands bands;
    // Experimental: studentize the truncated-variance CLT with the estimated
    // 2 * int c^2 du (truncated fourth powers / 3) instead of the simulated
    // path's spot variance.  T6p only.
    bool feasible_variance = false;

    SamplingSpec sampling() const;  // fine grid anchored at the smallest delta
    std::vector<std::string> validate() const;
};

struct RungReport {
    double delta_n = 0.0;
    double mean_error = 0.0;
    double rmse = 0.0;
    double mean_limit = 0.0;
    double mean_statistic = 0.0;
};

struct RateFitReport {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    bool degenerate = false;
};

struct CltBlock {
    std::size_t m = 0;
    double z_mean = 0.0;
    double z_variance = 0.0;
    double ks_distance = 0.0;
    double ks_p = 0.0;
    double mean_limit = 0.0;
    double mean_variance = 0.0;  // theoretical, averaged over paths
    std::vector<double> z;       // standardized replicate values, slot order
};

struct TheoremReport {
    std::string label;
    bool admissible = true;
    std::string refusal;
    double degenerate_exponent = 0.0;  // region-check rate when refused
    std::vector<RungReport> rungs;
    std::optional<RateFitReport> rate;
    std::optional<CltBlock> clt;
    bool bands_checked = false;
    bool bands_pass = true;
    std::vector<std::string> band_failures;
};

struct CovarianceReport {
    std::string label_j;
    std::string label_k;
    bool admissible = true;
    std::string refusal;
    std::size_t m = 0;
    double empirical_cov = 0.0;
    double theoretical_cov = 0.0;
    double standard_error = 0.0;
    double empirical_var_j = 0.0;
    double empirical_var_k = 0.0;
    double theoretical_var_j = 0.0;  // diagonal consistency targets
    double theoretical_var_k = 0.0;
    bool bands_checked = false;
    bool bands_pass = true;
    std::vector<std::string> band_failures;
};

// LLN error curves across the ladder plus the rate-slope fit.
TheoremReport run_lln(const ExperimentPlan& plan);

// Studentized CLT check at the smallest ladder step: standardized errors,
// their moments, and the KS distance to N(0,1).  Mixed-normal theorems are
// standardized per path by that path's own conditional variance.
TheoremReport run_clt(const ExperimentPlan& plan);

// Pairwise covariance of sqrt(1/delta)-scaled errors against the joint-CLT
// target; plan.functionals must have exactly two entries.
CovarianceReport run_covariance_pair(const ExperimentPlan& plan);

// Re-exported here because the harness owns the acceptance-band machinery.
stats::KsResult ks_distance(std::span<const double> samples);

}  // namespace powvar
