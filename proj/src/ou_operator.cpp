#include "gns/ou_operator.hpp"
#include "gns/errors.hpp"

#include <cmath>

namespace gns {

namespace {

void check_rho(double rho) {
    if (!(rho > -1.0 && rho < 1.0)) throw DomainError("rho must lie in (-1,1)");
}

} // namespace

OUEvaluation ou_indicator(const IntervalUnion& s, double rho, double x) {
    check_rho(rho);
    OUEvaluation out;
    out.rho = rho;
    out.set_hash = s.hash();
    double sig = std::sqrt(1.0 - rho * rho);
    double c = rho / sig;
    double v = 0.0, d = 0.0, d2 = 0.0;
    for (const auto& p : s.intervals()) {
        double ul = (p.lo - rho * x) / sig, uh = (p.hi - rho * x) / sig;
        v += gaussian_mass(ul, uh);
        double gl = density(ul), gh = density(uh);
        d += gl - gh;
        if (std::isfinite(ul)) d2 += ul * gl;
        if (std::isfinite(uh)) d2 -= uh * gh;
    }
    out.value = std::min(1.0, std::max(0.0, v));
    out.derivative = c * d;
    out.second_derivative = c * c * d2;
    return out;
}

double ou_apply(const RealFn& f, double rho, double x, int nodes) {
    check_rho(rho);
    const auto& r = gauss_hermite_rule(nodes);
    double sig = std::sqrt(1.0 - rho * rho);
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(rho * x + sig * r.nodes[i]);
    return s;
}

double semigroup_check(const IntervalUnion& s, double rho1, double rho2, double x) {
    check_rho(rho1);
    check_rho(rho2);
    double outer = ou_apply([&](double y) { return ou_indicator(s, rho2, y).value; }, rho1, x);
    return std::abs(outer - ou_indicator(s, rho1 * rho2, x).value);
}

double heat_equation_residual(const IntervalUnion& s, double rho, double x, double h) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("heat_equation_residual: rho must lie in (0,1)");
    if (!(h > 0.0 && rho - h > 0.0 && rho + h < 1.0)) throw DomainError("heat_equation_residual: rho +- h must lie in (0,1)");
    double dr = (ou_indicator(s, rho + h, x).value - ou_indicator(s, rho - h, x).value) / (2.0 * h);
    auto e = ou_indicator(s, rho, x);
    return std::abs(dr - (-e.second_derivative + x * e.derivative) / rho);
}

} // namespace gns
