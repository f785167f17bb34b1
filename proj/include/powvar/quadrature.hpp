#pragma once

#include <functional>
#include <vector>

namespace powvar::quad {

// Nodes/weights for \int f(x) e^{-x^2} dx ~ sum w_i f(x_i).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached, thread-safe; n up to 512 (Newton iteration on the orthonormal
// recurrence, stable at that order).
const HermiteRule& gauss_hermite(int n);

// E[g(Z)] for Z ~ N(mu, sigma^2) with a fixed rule size.
double gauss_expectation(const std::function<double(double)>& g, double mu, double sigma, int n_nodes);

// Doubles the rule 32 -> 512 until two successive estimates agree to rel_tol;
// returns the last estimate (capped at 512 nodes).
double gauss_expectation_adaptive(const std::function<double(double)>& g, double mu, double sigma,
                                  double rel_tol = 1e-9);

// Adaptive Simpson on [a, b]; robust for integrands with isolated kinks when
// the kinks are passed as breakpoints.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-11, int max_depth = 48);

double integrate_with_breakpoints(const std::function<double(double)>& f, double a, double b,
                                  std::vector<double> breakpoints, double abs_tol = 1e-11);

// Chebyshev interpolant of a smooth function on [lo, hi]; node count doubles
// until the interpolant reproduces fresh midpoint samples to tol.
class ChebyshevInterp {
  public:
    ChebyshevInterp(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);
    double operator()(double x) const;
    int size() const { return static_cast<int>(nodes_.size()); }

  private:
    double lo_, hi_;
    std::vector<double> nodes_;   // Chebyshev points in [lo, hi]
    std::vector<double> values_;
    std::vector<double> bary_w_;  // barycentric weights
};

}  // namespace powvar::quad
