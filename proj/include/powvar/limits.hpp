#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powvar/functionals.hpp"
#include "powvar/functions.hpp"
#include "powvar/model.hpp"
#include "powvar/simulate.hpp"

namespace powvar {

enum class Theorem { T1a, T1b, T1c, T2, T3i, T3ii, T3iii, T4, T5, T6, T6p, T7i, T7ii };

std::string theorem_name(Theorem thm);
std::optional<Theorem> theorem_from_name(const std::string& name);

// Raised when a (theorem, function, model) combination falls outside the
// theorem's hypothesis region; the message names the violated inequality.
struct AdmissibilityError : std::runtime_error {
    AdmissibilityError(std::string condition_, double exponent_, const std::string& message)
        : std::runtime_error(message), condition(std::move(condition_)), degenerate_exponent(exponent_) {}
    std::string condition;
    double degenerate_exponent;  // NaN when no degenerate-branch rate applies
};

// Which branch of the CLT applies for activity index s (pass r for T5/T6,
// varpi for T6').  In the degenerate branch, degenerate_exponent carries the
// o_Pu(Delta^e) rate: 1 - s/2 (T5), (2-s)(1+r)(2-r)/(4+2s(1-r)) (T6),
// (2-s)*varpi (T6').  continuous_model relaxes the T5/T6 restrictions.
struct RegionCheck {
    bool clt_holds = false;
    double degenerate_exponent = 0.5;
    std::string condition;  // the inequality that decides the branch
};

RegionCheck clt_region_check(Theorem thm, double s, double r_or_varpi, bool continuous_model = false);

double rate_exponent_eta(double s, double r);

// The (theorem, test function / truncation) assignment the harness runs.
struct Functional {
    Theorem theorem;
    std::optional<TestFunction> f;
    std::optional<TruncationSpec> trunc;
    double psi_eta = std::numeric_limits<double>::infinity();  // T2/T4 cutoff scale

    std::string label() const;
};

// LLN limit along the path at the theorem's normalization (T1*, T2, T3*).
FunctionalSeries lln_limit(const Functional& fn, const ModelSpec& spec, const PathBundle& path,
                           double delta_n);

// int_0^t rho_{sigma_u}(g) du along the path (Chebyshev table over sigma for
// stochastic vol, closed form for constant vol).
double integral_of_rho(const TestFunction& g, const ModelSpec& spec, const PathBundle& path, double t);

// m_r int_0^t c_u^{r/2} du.
double integral_m_r_c(double r, const ModelSpec& spec, const PathBundle& path, double t);

// Conditional asymptotic variance at time t for the CLT theorems
// (T4, T5, T6, T6', T7i, T7ii).  Throws AdmissibilityError outside the
// hypothesis region.
double clt_variance(const Functional& fn, const ModelSpec& spec, const PathBundle& path, double t);

// Checks the full admissibility of fn for the model (class membership plus
// hypothesis region); throws with the violated condition if not admissible.
void check_admissible(const Functional& fn, const ModelSpec& spec);

// One draw of the jump CLT limit Z(g)_t: per jump, kappa ~ U(0,1) and a pair
// of standard normals split the spot vol across the jump.
struct ZLawSample {
    double value = 0.0;
    std::vector<std::pair<double, double>> per_jump;  // (time, contribution)
};

ZLawSample sample_z_law(const std::function<double(double)>& g, const PathBundle& path,
                        std::uint64_t seed, double t);

// C(g)_t = sum g(jump)^2 (c_left + jump of c / 2): the conditional variance
// of Z(g)_t given the path.
double z_conditional_variance(const std::function<double(double)>& g, const PathBundle& path, double t);

// Limit of V^n(f) - Hbar^n(f psi_eta) for finite-activity (compound Poisson)
// models: sum of f over jumps minus the compensator rate * t.
FunctionalSeries t2_limit_compound_poisson(const TestFunction& f, double eta, const ModelSpec& spec,
                                           const PathBundle& path, double delta_n);

// E[g(J)] under the compound-Poisson jump-size law (quadrature with
// breakpoints at g's kinks).
double expect_of_jump_size(const JumpSizeSpec& size, const std::function<double(double)>& g,
                           std::vector<double> breakpoints = {});

// T8 component classes.
enum class JClass { J1, J2, J3, J4, J5 };

JClass j_class_of(Theorem thm);
double r_of_component(const Functional& fn);

// Integral of the (C200) covariance density along the path, plus the shared
// Z(g) polarization term when both components carry a jump part.
double covariance_target(const Functional& a, const Functional& b, const ModelSpec& spec,
                         const PathBundle& path, double t);

}  // namespace powvar
