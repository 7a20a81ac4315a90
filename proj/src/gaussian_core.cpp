#include "gns/gaussian_core.hpp"
#include "gns/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace gns {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
// gamma_1 is below 1e-42 outside this window; integrands here grow at most polynomially.
constexpr double kTailCut = 14.0;

} // namespace

double density(double t) {
    if (std::isinf(t)) return 0.0;
    return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double phi(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

double phi_upper(double t) { return 0.5 * std::erfc(t / kSqrt2); }

double phi_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("phi_inv: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    double x = -kSqrt2 * boost::math::erfc_inv(2.0 * p);
    // one Newton step against the tail that carries the precision
    double r = p < 0.5 ? phi(x) - p : (1.0 - p) - phi_upper(x);
    double d = density(x);
    if (d > 0.0) x -= r / d;
    return x;
}

double gaussian_mass(double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    if (lo >= 0.0) return phi_upper(lo) - phi_upper(hi);
    if (hi <= 0.0) return phi(hi) - phi(lo);
    return 1.0 - phi(lo) - phi_upper(hi);
}

GaussianMoment gaussian_moment(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw DomainError("gaussian_moment: need lo <= hi");
    return {gaussian_mass(lo, hi), density(lo) - density(hi)};
}

void QuadratureSpec::validate() const {
    if (node_count < 8) throw DomainError("QuadratureSpec: node_count must be >= 8");
    if (abs_tol < 0.0 || rel_tol < 0.0 || (abs_tol == 0.0 && rel_tol == 0.0))
        throw DomainError("QuadratureSpec: tolerances must be >= 0 and not both zero");
}

const GaussHermiteRule& gauss_hermite_rule(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    if (n < 1 || n > 500) throw DomainError("gauss_hermite_rule: node count must be in [1,500]");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    // Golub-Welsch on the Jacobi matrix of the monic probabilists' Hermite family.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    auto rule = std::make_unique<GaussHermiteRule>();
    rule->nodes.resize(n);
    rule->weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        // Newton polish, then Christoffel weight 1 / sum e_k(x)^2
        for (int it2 = 0; it2 < 3; ++it2) {
            double e0 = 1.0, e1 = x;
            if (n == 1) { e1 = x; e0 = 1.0; }
            else {
                for (int k = 1; k < n; ++k) {
                    double e2 = (x * e1 - std::sqrt(double(k)) * e0) / std::sqrt(double(k + 1));
                    e0 = e1;
                    e1 = e2;
                }
            }
            // e1 = e_n(x), e0 = e_{n-1}(x); e_n' = sqrt(n) e_{n-1}
            double dx = e1 / (std::sqrt(double(n)) * e0);
            if (!std::isfinite(dx)) break;
            x -= dx;
            if (std::abs(dx) < 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        double s = 1.0, e0 = 1.0, e1 = x;
        for (int k = 1; k < n; ++k) {
            s += e1 * e1;
            double e2 = (x * e1 - std::sqrt(double(k)) * e0) / std::sqrt(double(k + 1));
            e0 = e1;
            e1 = e2;
        }
        rule->nodes[i] = x;
        rule->weights[i] = 1.0 / s;
    }
    // exact symmetry
    for (int i = 0; i < n / 2; ++i) {
        double x = 0.5 * (rule->nodes[n - 1 - i] - rule->nodes[i]);
        double w = 0.5 * (rule->weights[n - 1 - i] + rule->weights[i]);
        rule->nodes[i] = -x;
        rule->nodes[n - 1 - i] = x;
        rule->weights[i] = rule->weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule->nodes[n / 2] = 0.0;
    auto& ref = *rule;
    cache.emplace(n, std::move(rule));
    return ref;
}

namespace {

double apply_rule(const GaussHermiteRule& r, const RealFn& f) {
    // sum small weights first
    size_t n = r.nodes.size();
    double s = 0.0;
    for (size_t i = 0; i < n / 2; ++i) s += r.weights[i] * f(r.nodes[i]) + r.weights[n - 1 - i] * f(r.nodes[n - 1 - i]);
    if (n % 2 == 1) s += r.weights[n / 2] * f(r.nodes[n / 2]);
    return s;
}

struct Simpson {
    const RealFn& g;
    long evals = 0;
    long budget;
    bool exhausted = false;

    double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = g(lm), frm = g(rm);
        evals += 2;
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (depth <= 0 || evals > budget) {
            exhausted = true;
            return left + right + delta / 15.0;
        }
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

} // namespace

Estimate integrate_gaussian(const RealFn& f, const QuadratureSpec& spec) {
    spec.validate();
    Estimate out;
    switch (spec.scheme) {
    case QuadratureScheme::gauss_hermite: {
        int n = spec.node_count;
        int m = std::max(8, n / 2 + (n / 2) % 2);
        out.value = apply_rule(gauss_hermite_rule(n), f);
        out.error = std::abs(out.value - apply_rule(gauss_hermite_rule(m), f));
        break;
    }
    case QuadratureScheme::tanh_sinh: {
        // split at 0 so both halves use the half-line map; nodes cluster near 0 and thin out in the tail
        boost::math::quadrature::tanh_sinh<double> ts;
        auto g = [&](double x) { return f(x) * density(x); };
        double tol = spec.rel_tol > 0.0 ? spec.rel_tol : std::max(spec.abs_tol, 1e-14);
        double e1 = 0.0, e2 = 0.0;
        out.value = ts.integrate(g, 0.0, kInf, tol, &e1) + ts.integrate(g, -kInf, 0.0, tol, &e2);
        out.error = e1 + e2;
        break;
    }
    case QuadratureScheme::adaptive_simpson: {
        RealFn g = [&](double x) { return f(x) * density(x); };
        Simpson s{g, 0, 1000L * spec.node_count};
        double a = -kTailCut, b = kTailCut;
        double fa = g(a), fb = g(b), fm = g(0.0);
        double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        double tol = std::max(spec.abs_tol, 1e-15);
        out.value = s.step(a, b, fa, fm, fb, whole, tol, 50);
        out.error = s.exhausted ? std::abs(whole - out.value) : tol;
        break;
    }
    }
    double allowed = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    if (!(out.error <= allowed))
        throw ConvergenceError("integrate_gaussian: tolerance not reached within node budget", out.value, out.error);
    return out;
}

Estimate integrate_gaussian_interval(const RealFn& f, double lo, double hi, double tol) {
    if (lo > hi) throw DomainError("integrate_gaussian_interval: need lo <= hi");
    double a = std::max(lo, -kTailCut), b = std::min(hi, kTailCut);
    if (!(a < b)) return {};
    auto g = [&](double x) { return f(x) * density(x); };
    // tol is absolute; boost wants it relative to the L1 norm, so get the scale first
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    Estimate out;
    double l1 = 0.0;
    out.value = GK::integrate(g, a, b, 0, 0.0, &out.error, &l1);
    if (out.error <= tol || l1 == 0.0) return out;
    double rel = std::max(tol / l1, 4.0 * std::numeric_limits<double>::epsilon());
    out.value = GK::integrate(g, a, b, 15, rel, &out.error);
    return out;
}

} // namespace gns
