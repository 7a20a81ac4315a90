#include "gns/functionals.hpp"
#include "gns/errors.hpp"
#include "gns/hermite_mehler.hpp"
#include "gns/ou_operator.hpp"
#include "gns/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>

namespace gns {

std::string to_string(StabilityMethod m) {
    switch (m) {
    case StabilityMethod::quadrature: return "quadrature";
    case StabilityMethod::mehler: return "mehler";
    case StabilityMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

StabilityMethod stability_method_from_string(const std::string& s) {
    if (s == "quadrature") return StabilityMethod::quadrature;
    if (s == "mehler") return StabilityMethod::mehler;
    if (s == "mc" || s == "monte_carlo") return StabilityMethod::monte_carlo;
    throw ParseError("unknown method: " + s);
}

std::vector<double> indicator_hermite_coeffs(const IntervalUnion& s, int n) {
    std::vector<double> b(n + 1, 0.0);
    b[0] = measure(s);
    if (n == 0) return b;
    for (const auto& p : boundary(s)) {
        // int_lo^hi e_k gamma = (e_{k-1}(lo) g(lo) - e_{k-1}(hi) g(hi)) / sqrt(k)
        double g = density(p.location);
        if (g == 0.0) continue;
        auto e = hermite_normalized_all(n - 1, p.location);
        for (int k = 1; k <= n; ++k) b[k] -= p.normal * e[k - 1] * g / std::sqrt(double(k));
    }
    return b;
}

namespace {

StabilityEstimate by_quadrature(const IntervalUnion& s, double rho, double tol) {
    StabilityEstimate out;
    out.method = StabilityMethod::quadrature;
    for (const auto& p : s.intervals()) {
        auto e = integrate_gaussian_interval([&](double x) { return ou_indicator(s, rho, x).value; }, p.lo, p.hi, tol);
        out.value += e.value;
        out.error += e.error;
    }
    return out;
}

StabilityEstimate by_mehler(const IntervalUnion& s, double rho, int terms) {
    if (!(std::abs(rho) < 0.95)) throw ConvergenceError("mehler: |rho| must be below 0.95", 0.0, 1.0);
    int n = terms;
    if (n <= 0) n = rho == 0.0 ? 1 : std::clamp(int(std::ceil(std::log(1e-17) / std::log(std::abs(rho)))), 25, 1000);
    auto b = indicator_hermite_coeffs(s, n);
    StabilityEstimate out;
    out.method = StabilityMethod::mehler;
    out.terms = n;
    double p = 1.0;
    for (int k = 0; k <= n; ++k) {
        out.value += p * b[k] * b[k];
        p *= rho;
    }
    // sum_k b_k^2 = measure, so the tail is at most |rho|^{n+1} measure / (1-|rho|)
    out.error = std::abs(p) * b[0] / (1.0 - std::abs(rho));
    return out;
}

struct Membership {
    std::vector<double> ends;
    bool starts_inside = false;

    explicit Membership(const IntervalUnion& s) {
        for (const auto& p : s.intervals()) {
            if (std::isinf(p.lo)) starts_inside = true;
            else ends.push_back(p.lo);
            if (std::isfinite(p.hi)) ends.push_back(p.hi);
        }
    }
    bool operator()(double x) const {
        bool in = starts_inside;
        for (double e : ends) in ^= (x >= e);
        return in;
    }
};

} // namespace

std::vector<StabilityEstimate> noise_stability_mc_batch(const std::vector<IntervalUnion>& sets, double rho,
                                                        long pairs, uint64_t seed) {
    if (!(rho > -1.0 && rho < 1.0)) throw DomainError("noise_stability: rho must lie in (-1,1)");
    if (pairs <= 0) throw DomainError("noise_stability: Monte Carlo needs a positive pair count");
    std::vector<Membership> mem;
    mem.reserve(sets.size());
    for (const auto& s : sets) mem.emplace_back(s);
    std::vector<long> hits(sets.size(), 0);
    double sig = std::sqrt(1.0 - rho * rho);
    CounterRng rng(seed);
    for (long i = 0; i < pairs; ++i) {
        double x, z;
        rng.normal_pair(x, z);
        double y = rho * x + sig * z;
        for (size_t j = 0; j < mem.size(); ++j) hits[j] += (mem[j](x) && mem[j](y));
    }
    std::vector<StabilityEstimate> out(sets.size());
    for (size_t j = 0; j < sets.size(); ++j) {
        double p = double(hits[j]) / double(pairs);
        // plug-in variance collapses at 0 or all hits; the half-count correction keeps it honest there
        double q = (double(hits[j]) + 0.5) / (double(pairs) + 1.0);
        out[j] = {p, std::sqrt(q * (1.0 - q) / double(pairs)), StabilityMethod::monte_carlo, seed, pairs, 0};
    }
    return out;
}

StabilityEstimate noise_stability(const IntervalUnion& s, double rho, StabilityMethod method, const StabilityOptions& opts) {
    if (!(rho > -1.0 && rho < 1.0)) throw DomainError("noise_stability: rho must lie in (-1,1)");
    switch (method) {
    case StabilityMethod::quadrature: return by_quadrature(s, rho, opts.quad_tol);
    case StabilityMethod::mehler: return by_mehler(s, rho, opts.mehler_terms);
    case StabilityMethod::monte_carlo: return noise_stability_mc_batch({s}, rho, opts.mc_pairs, opts.seed)[0];
    }
    return {};
}

double halfspace_stability(double a, double rho) {
    return noise_stability(IntervalUnion::from(halfspace_with_measure(a, true)), rho).value;
}

std::string to_string(PenaltyKind p) {
    switch (p) {
    case PenaltyKind::phi_squared: return "phi_squared";
    case PenaltyKind::phi_squared_with_volume: return "phi_squared_with_volume";
    case PenaltyKind::barycenter_squared: return "barycenter_squared";
    case PenaltyKind::none: return "none";
    }
    return "?";
}

PenaltyKind penalty_kind_from_string(const std::string& s) {
    if (s == "phi_squared" || s == "phi") return PenaltyKind::phi_squared;
    if (s == "phi_squared_with_volume" || s == "phi_volume" || s == "2z") return PenaltyKind::phi_squared_with_volume;
    if (s == "barycenter_squared" || s == "barycenter") return PenaltyKind::barycenter_squared;
    if (s == "none") return PenaltyKind::none;
    throw ParseError("unknown penalty: " + s);
}

void ObjectiveSpec::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("ObjectiveSpec: rho must lie in (0,1)");
    if (!(beta > 0.0 && beta <= rho)) throw DomainError("ObjectiveSpec: beta must lie in (0, rho]");
    if (!(epsilon >= 0.0)) throw DomainError("ObjectiveSpec: epsilon must be >= 0");
    if (!(a > 0.0 && a < 1.0)) throw DomainError("ObjectiveSpec: a must lie in (0,1)");
}

double ObjectiveSpec::alpha() const { return -phi_inv(a); }

double ObjectiveSpec::volume_weight() const { return 2.0 * (1.0 + std::abs(alpha())); }

int barycenter_sign(const IntervalUnion& s) {
    double z = barycenter(s);
    if (z > 0.0) return 1;
    if (z < 0.0) return -1;
    throw AlignmentError("barycenter is zero; nu(z) undefined");
}

double penalty_weight(double beta, double alpha, int sign, double x) {
    return phi((beta * sign * x - alpha) / std::sqrt(1.0 - beta * beta));
}

double penalty_weight_derivative(double beta, double alpha, int sign, double x) {
    double q = std::sqrt(1.0 - beta * beta);
    return beta * sign / q * density((beta * sign * x - alpha) / q);
}

double penalty_mass(const IntervalUnion& s, double beta, double alpha, int sign) {
    double m = 0.0;
    for (const auto& p : s.intervals())
        m += integrate_gaussian_interval([&](double x) { return penalty_weight(beta, alpha, sign, x); }, p.lo, p.hi).value;
    return m;
}

namespace {

void require_measure(const IntervalUnion& s, double a, const char* who) {
    if (std::abs(measure(s) - a) > 1e-10) throw PreconditionError(std::string(who) + ": measure(s) must equal a to 1e-10");
}

} // namespace

double eta_penalty(const IntervalUnion& s, const HalfSpace1D& h, double beta, double a) {
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("eta_penalty: beta must lie in [0,1)");
    require_measure(s, a, "eta_penalty");
    auto hs = IntervalUnion::from(h);
    require_measure(hs, a, "eta_penalty (half space)");
    int sg = barycenter_sign(s);
    if ((sg > 0) != (h.side == HalfSide::right_ray))
        throw PreconditionError("eta_penalty: half space not aligned with the barycenter");
    double alpha = -phi_inv(a);
    return penalty_mass(set_difference(hs, s), beta, alpha, sg) - penalty_mass(set_difference(s, hs), beta, alpha, sg);
}

double deficit(const IntervalUnion& s, double rho, double a) {
    require_measure(s, a, "deficit");
    return halfspace_stability(a, rho) - noise_stability(s, rho).value;
}

double barycenter_deficit(const IntervalUnion& s) {
    double m = measure(s);
    if (!(m > 0.0 && m < 1.0)) return 0.0;
    double zh = density(phi_inv(m));
    double z = barycenter(s);
    return zh * zh - z * z;
}

double alpha_weight(double alpha, double m) {
    if (alpha == 0.0) return 1.0;
    return std::exp(-alpha * alpha * m);
}

DeficitReport deficit_report(const IntervalUnion& s, double rho, double beta, double a, double z0) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("deficit_report: rho must lie in (0,1)");
    if (!(beta > 0.0 && beta <= rho)) throw DomainError("deficit_report: beta must lie in (0, rho]");
    if (!(z0 > 0.0)) throw DomainError("deficit_report: z0 must be positive");
    require_measure(s, a, "deficit_report");
    DeficitReport r;
    r.set = s.to_string();
    r.a = a;
    r.rho = rho;
    r.beta = beta;
    r.z0 = z0;
    r.z = barycenter(s);
    if (std::abs(r.z) < z0) throw PreconditionError("deficit_report: |barycenter| must be >= z0");
    int sg = r.z > 0 ? 1 : -1;
    auto h = halfspace_with_measure(a, sg > 0);
    auto hs = IntervalUnion::from(h);
    auto ns_h = noise_stability(hs, rho);
    auto ns_s = noise_stability(s, rho);
    r.delta = ns_h.value - ns_s.value;
    r.eta_beta = eta_penalty(s, h, beta, a);
    r.eta_rho = eta_penalty(s, h, rho, a);
    r.tolerance = std::max(1e-8, 10.0 * (ns_h.error + ns_s.error));

    double alpha = -phi_inv(a);
    double ratio = beta < rho ? beta / (rho - beta) : kInf;
    double common = 1e-7 * a * z0 * z0 * rho * (1 - rho) * (1 - rho) * beta * (1 - beta * beta) * a * (1 - a) /
                    ((6 + std::abs(alpha)) * (6 + std::abs(alpha)));
    r.lower_constant = common * alpha_weight(alpha, std::max(1.0, ratio));
    r.lower_constant_alt = common * alpha_weight(alpha, std::max(0.0, ratio - 1.0));
    r.lower_ok = r.lower_constant * r.eta_beta <= r.delta + r.tolerance;
    r.lower_ok_alt = r.lower_constant_alt * r.eta_beta <= r.delta + r.tolerance;
    r.upper_ok = r.delta <= 2.0 * r.eta_rho + r.tolerance;
    if (std::abs(a - 0.5) < 1e-15 && beta == rho) {
        double q = 1 - rho * rho;
        r.lower_constant_special = 1e-9 * rho * rho * z0 * z0 * q * q;
        r.lower_ok_special = *r.lower_constant_special * r.eta_rho <= r.delta + r.tolerance;
    }
    return r;
}

std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void to_json(nlohmann::json& j, const DeficitReport& r) {
    j = nlohmann::json{{"set", r.set}, {"a", r.a}, {"rho", r.rho}, {"beta", r.beta}, {"z", r.z}, {"z0", r.z0},
                       {"delta", r.delta}, {"eta_beta", r.eta_beta}, {"eta_rho", r.eta_rho},
                       {"lower_constant", r.lower_constant}, {"lower_constant_alt", r.lower_constant_alt},
                       {"tolerance", r.tolerance}, {"lower_ok", r.lower_ok}, {"lower_ok_alt", r.lower_ok_alt},
                       {"upper_ok", r.upper_ok}, {"seed", r.seed}};
    if (r.lower_constant_special) {
        j["lower_constant_special"] = *r.lower_constant_special;
        j["lower_ok_special"] = *r.lower_ok_special;
    }
}

std::string deficit_csv_header() {
    return "set,a,rho,beta,z,delta,eta_beta,eta_rho,lower_constant,lower_ok,upper_ok,seed";
}

std::string to_csv_row(const DeficitReport& r) {
    return "\"" + r.set + "\"," + format_real(r.a) + "," + format_real(r.rho) + "," + format_real(r.beta) + "," +
           format_real(r.z) + "," + format_real(r.delta) + "," + format_real(r.eta_beta) + "," +
           format_real(r.eta_rho) + "," + format_real(r.lower_constant) + "," + (r.lower_ok ? "1" : "0") + "," +
           (r.upper_ok ? "1" : "0") + "," + std::to_string(r.seed);
}

double objective(const IntervalUnion& s, const ObjectiveSpec& spec) {
    spec.validate();
    double ns = noise_stability(s, spec.rho).value;
    if (spec.penalty == PenaltyKind::none || spec.epsilon == 0.0) {
        if (spec.penalty == PenaltyKind::phi_squared) require_measure(s, spec.a, "objective");
        if (spec.penalty == PenaltyKind::phi_squared_with_volume)
            return ns - spec.volume_weight() * std::abs(measure(s) - spec.a);
        return ns;
    }
    switch (spec.penalty) {
    case PenaltyKind::phi_squared: {
        require_measure(s, spec.a, "objective");
        double a0 = penalty_mass(s, spec.beta, spec.alpha(), barycenter_sign(s));
        return ns - spec.epsilon * a0 * a0;
    }
    case PenaltyKind::phi_squared_with_volume: {
        double a0 = penalty_mass(s, spec.beta, spec.alpha(), barycenter_sign(s));
        return ns - spec.epsilon * a0 * a0 - spec.volume_weight() * std::abs(measure(s) - spec.a);
    }
    case PenaltyKind::barycenter_squared: {
        double z = barycenter(s);
        return ns - spec.epsilon * z * z;
    }
    case PenaltyKind::none: break;
    }
    return ns;
}

A0Zeta a0_and_zeta(const IntervalUnion& s, double beta, double a) {
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("a0_and_zeta: beta must lie in [0,1)");
    if (!(a > 0.0 && a < 1.0)) throw DomainError("a0_and_zeta: a must lie in (0,1)");
    int sg = barycenter_sign(s);
    double alpha = -phi_inv(a);
    A0Zeta out;
    out.a0 = penalty_mass(s, beta, alpha, sg);
    // Product set s x R with z = (z1, 0): the perpendicular part of zeta factors into
    // (int_s W' gamma) (int_R y gamma dy) / |z|.
    double dmass = 0.0;
    for (const auto& p : s.intervals())
        dmass += integrate_gaussian_interval([&](double x) { return penalty_weight_derivative(beta, alpha, sg, x); }, p.lo, p.hi).value;
    QuadratureSpec qs;
    qs.scheme = QuadratureScheme::tanh_sinh;
    qs.abs_tol = 1e-12;
    double ymean = integrate_gaussian([](double y) { return y; }, qs).value;
    out.zeta = dmass * ymean / std::abs(barycenter(s));
    return out;
}

} // namespace gns
