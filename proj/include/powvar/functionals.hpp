#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "powvar/functions.hpp"
#include "powvar/model.hpp"
#include "powvar/simulate.hpp"

namespace powvar {

// A realized functional evaluated along the observation grid: values[i] is
// the running value over the first i increments (values[0] == 0).
struct FunctionalSeries {
    std::vector<double> times;   // 0, delta, 2 delta, ...
    std::vector<double> values;  // same length
    std::string meta;
    double delta_n = 0.0;
    bool biased_below_cutoff = false;  // jump functional on a stable_like path

    double terminal() const { return values.empty() ? 0.0 : values.back(); }
    // running value at the last observation time <= t
    double at_time(double t) const;
};

// V^n(f)_t = sum f(increment_i)
FunctionalSeries v_n(const TestFunction& f, std::span<const double> increments, double delta_n);

// V'^n(f)_t = sum f(increment_i / sqrt(delta_n)).  For power functions this
// is evaluated as delta_n^{-r/2} * V^n so the scaling identity
// delta_n^{1-r/2} V^n(h_r) == delta_n V'^n(h_r) holds exactly.
FunctionalSeries v_prime_n(const TestFunction& f, std::span<const double> increments, double delta_n);

// V''^n(varpi, alpha)_t = sum increment^2 1{|increment| <= alpha delta^varpi}
FunctionalSeries v_trunc_n(const TruncationSpec& trunc, std::span<const double> increments,
                           double delta_n);

// f * mu: running sums of f over the recorded jumps, sampled on the
// observation grid of the given step.
FunctionalSeries jump_functional(const TestFunction& f, const PathBundle& path, double delta_n);

// Pathwise limit of V^n(f) under the no-assumption LLN; picks the case from
// the class membership of f and the model (a: f*mu, b: f*mu + C,
// c: f*mu + variation of the drift).  Throws NoLlnTarget if no case applies.
FunctionalSeries limit_target_t1(const TestFunction& f, const ModelSpec& spec, const PathBundle& path,
                                 double delta_n);

struct NoLlnTarget : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Trapezoid of spot variance^q on the fine grid, up to each index.
double integrate_c_power(const PathBundle& path, double q, double t);
// Trapezoid of an arbitrary function of sigma along the path.
double integrate_of_sigma(const PathBundle& path, const std::function<double(double)>& f_of_sigma,
                          double t);

// One-step expectation H(f) = E[f(X_delta - X_0)] for a Levy model (constant
// drift/vol + compound Poisson), by conditioning on jump count k <= 2; the
// reported bound adds the k >= 3 Poisson tail to the quadrature tolerance.
struct LevyExpectation {
    double value = 0.0;
    double error_bound = 0.0;
};

LevyExpectation levy_increment_expectation(const ModelSpec& spec, const TestFunction& f,
                                           double delta_n, double precision = 1e-9);

}  // namespace powvar
