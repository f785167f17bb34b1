#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace powvar {

// Smooth cutoff: psi_eta == 1 on [-eta, eta], == 0 outside [-2eta, 2eta],
// C-infinity in between (exp(-1/t) glue).  eta = +inf means psi == 1.
struct CutoffPsi {
    double eta;

    double operator()(double x) const;
    static double transition(double t);  // C-inf step: 0 at t<=0, 1 at t>=1
};

enum class FuncKind {
    Power,           // |x|^r
    PowerCutoff,     // |x|^r * psi_eta(x)
    CosBump,         // (1 - cos x)/2, even C2_b
    RationalSquare,  // x^2 / (1 + x^2), even C2_b
    SquareIndicator  // x^2 * 1{|x| <= u}
};

// A member of the catalog of admissible test functions.  Catalog-only (no
// user lambdas) so class membership stays decidable.
class TestFunction {
  public:
    static TestFunction power(double r);
    static TestFunction power_cutoff(double r, double eta);
    static TestFunction cos_bump();
    static TestFunction rational_square();
    static TestFunction square_indicator(double threshold);

    // "power:r=1.5", "power_cutoff:r=1,eta=0.5", "rational_square",
    // "cos_bump", "square_indicator:u=0.5"
    static TestFunction parse(const std::string& text);

    double operator()(double x) const;

    FuncKind kind() const { return kind_; }
    double r() const { return r_; }
    double eta() const { return eta_; }
    double threshold() const { return threshold_; }
    std::string name() const;

    bool is_bounded() const;
    double bound() const;  // sup |f|, +inf for unbounded
    bool is_continuous() const { return kind_ != FuncKind::SquareIndicator; }
    bool is_c2b() const { return kind_ == FuncKind::CosBump || kind_ == FuncKind::RationalSquare; }
    // C1 everywhere (power needs r > 1 for differentiability at 0)
    bool is_c1() const;

    // df/dx where defined; throws for square_indicator.
    std::function<double(double)> derivative() const;

  private:
    TestFunction(FuncKind kind, double r, double eta, double threshold)
        : kind_(kind), r_(r), eta_(eta), threshold_(threshold) {}

    FuncKind kind_;
    double r_ = 0.0;
    double eta_ = 0.0;
    double threshold_ = 0.0;
};

// Function classes: E_r (= |x|^r near 0), E'_r (~ |x|^r at 0),
// E''_r (O(|x|^r) at 0), E'''_r (o(|x|^r) at 0).
enum class FuncClass { EqualsNearZero, EquivalentAtZero, BigO, LittleO };

bool in_class(const TestFunction& f, FuncClass cls, double r);

struct ClassMembership {
    FuncClass cls;
    double r;
    bool bounded;
};

// Canonical membership list (the exponents a caller would quote);
// in_class() answers arbitrary (class, r) queries.
std::vector<ClassMembership> class_membership(const TestFunction& f);

// m_r = E|U|^r for U ~ N(0,1): 2^{r/2} Gamma((r+1)/2) / sqrt(pi).
double abs_moment(double r);

// rho_sigma(g) = E[g(Z)], Z ~ N(0, sigma^2).  Closed form for power and
// square_indicator; cusp-free quadrature otherwise.
double rho(const TestFunction& g, double sigma);

// Same integral for an arbitrary integrand (used for g^2, f_j*f_k, ...).
double rho_raw(const std::function<double(double)>& g, double sigma);

// phi_r(x) = min(1, |x|^r) (r > 0), 1{x != 0} (r == 0).  Internal helper for
// the hypothesis-integrability checks.
double phi_r(double r, double x);

}  // namespace powvar
