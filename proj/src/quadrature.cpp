#include "powvar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace powvar::quad {

namespace {

// Implicit-QL eigen decomposition of a symmetric tridiagonal matrix, tracking
// the first row of the eigenvector matrix (EISPACK imtql2 reduced to what
// Golub-Welsch needs).  d: diagonal, e: subdiagonal (e[n-1] ignored),
// z: initialized to the first unit vector on entry.
void imtqlx(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    const double eps = 2.220446049250313e-16;
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            int m = l;
            while (m < n - 1) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (++iter > 60) throw std::runtime_error("gauss_hermite: QL iteration failed");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending, carrying z
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(z[i], z[k]);
        }
    }
}

// Golub-Welsch on the Hermite Jacobi matrix (weight e^{-x^2}).
HermiteRule build_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    std::vector<double> diag(n, 0.0);
    std::vector<double> sub(n, 0.0);
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(0.5 * j);
    std::vector<double> first_row(n, 0.0);
    first_row[0] = 1.0;
    imtqlx(diag, sub, first_row);
    HermiteRule rule;
    rule.nodes = diag;
    rule.weights.resize(n);
    const double mu0 = 1.7724538509055160273;  // sqrt(pi) = total weight
    for (int i = 0; i < n; ++i) rule.weights[i] = mu0 * first_row[i] * first_row[i];
    return rule;
}

}  // namespace

const HermiteRule& gauss_hermite(int n) {
    static std::map<int, HermiteRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
    return it->second;
}

double gauss_expectation(const std::function<double(double)>& g, double mu, double sigma, int n_nodes) {
    if (sigma == 0.0) return g(mu);
    const HermiteRule& rule = gauss_hermite(n_nodes);
    const double scale = sigma * 1.4142135623730950488;  // sigma * sqrt(2)
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * g(mu + scale * rule.nodes[i]);
    return sum * 0.56418958354775628695;  // 1/sqrt(pi)
}

double gauss_expectation_adaptive(const std::function<double(double)>& g, double mu, double sigma,
                                  double rel_tol) {
    if (sigma == 0.0) return g(mu);
    double prev = gauss_expectation(g, mu, sigma, 32);
    for (int n = 64; n <= 512; n *= 2) {
        const double next = gauss_expectation(g, mu, sigma, n);
        if (std::abs(next - prev) <= rel_tol * std::max(1e-300, std::abs(next))) return next;
        prev = next;
    }
    return prev;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                     double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

double integrate_with_breakpoints(const std::function<double(double)>& f, double a, double b,
                                  std::vector<double> breakpoints, double abs_tol) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    double total = 0.0;
    double lo = a;
    for (double p : breakpoints) {
        if (p <= lo || p > b) continue;
        total += integrate_adaptive(f, lo, p, abs_tol);
        lo = p;
    }
    if (lo < b) total += integrate_adaptive(f, lo, b, abs_tol);
    return total;
}

ChebyshevInterp::ChebyshevInterp(const std::function<double(double)>& f, double lo, double hi, double tol)
    : lo_(lo), hi_(hi) {
    if (!(hi > lo)) {
        // Degenerate range: constant interpolant.
        nodes_ = {lo};
        values_ = {f(lo)};
        bary_w_ = {1.0};
        return;
    }
    const double pi = 3.14159265358979323846;
    for (int n = 17; n <= 1025; n = 2 * n - 1) {
        nodes_.assign(n, 0.0);
        values_.assign(n, 0.0);
        bary_w_.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const double theta = pi * k / (n - 1);
            nodes_[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(theta);
            values_[k] = f(nodes_[k]);
            bary_w_[k] = (k % 2 == 0 ? 1.0 : -1.0);
        }
        bary_w_.front() *= 0.5;
        bary_w_.back() *= 0.5;
        // Probe halfway between adjacent nodes; accept when reproduced to tol.
        double worst = 0.0;
        double scale = 1e-300;
        for (int k = 0; k + 1 < n; k += 2) {
            const double x = 0.5 * (nodes_[k] + nodes_[k + 1]);
            const double truth = f(x);
            worst = std::max(worst, std::abs((*this)(x) - truth));
            scale = std::max(scale, std::abs(truth));
        }
        if (worst <= tol * std::max(1.0, scale)) return;
    }
}

double ChebyshevInterp::operator()(double x) const {
    if (nodes_.size() == 1) return values_[0];
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const double dx = x - nodes_[k];
        if (dx == 0.0) return values_[k];
        const double w = bary_w_[k] / dx;
        num += w * values_[k];
        den += w;
    }
    return num / den;
}

}  // namespace powvar::quad
