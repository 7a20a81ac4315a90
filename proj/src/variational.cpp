#include "gns/variational.hpp"
#include "gns/errors.hpp"
#include "gns/ou_operator.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace gns {

void to_json(nlohmann::json& j, const VariationReport& r) {
    j = nlohmann::json{{"first_variation_residual", r.first_variation_residual},
                       {"level_constant", r.level_constant},
                       {"second_variation", r.second_variation}};
    j["closed_form"] = r.closed_form ? nlohmann::json(*r.closed_form) : nlohmann::json(nullptr);
    j["oracle_value"] = r.oracle_value ? nlohmann::json(*r.oracle_value) : nlohmann::json(nullptr);
    auto pts = nlohmann::json::array();
    for (const auto& p : r.points)
        pts.push_back({{"location", p.location}, {"normal", p.normal}, {"level", p.level}, {"gradient", p.gradient},
                       {"eigen_residual", p.eigen_residual}, {"aligned", p.aligned}});
    j["points"] = pts;
}

namespace {

void check_rho01(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
}

// Penalty part of the first variation: L(x) = T(x) - term(x); its x-derivative is grad(x).
struct PenaltyGradient {
    enum { zero, phi, bary } mode = zero;
    double eps = 0.0, a0 = 0.0, beta = 0.0, alpha = 0.0, z = 0.0;
    int sign = 1;

    PenaltyGradient(const IntervalUnion& s, const ObjectiveSpec& spec) {
        spec.validate();
        eps = spec.epsilon;
        if (eps == 0.0 || spec.penalty == PenaltyKind::none) return;
        if (spec.penalty == PenaltyKind::barycenter_squared) {
            mode = bary;
            z = barycenter(s);
            return;
        }
        mode = phi;
        sign = barycenter_sign(s);
        beta = spec.beta;
        alpha = spec.alpha();
        a0 = penalty_mass(s, beta, alpha, sign); // zeta = 0 in the product reduction
    }
    double term(double x) const {
        if (mode == phi) return eps * a0 * penalty_weight(beta, alpha, sign, x);
        if (mode == bary) return eps * z * x;
        return 0.0;
    }
    double grad(double x) const {
        if (mode == phi) return eps * a0 * penalty_weight_derivative(beta, alpha, sign, x);
        if (mode == bary) return eps * z;
        return 0.0;
    }
    // weight w(x) of the squared linear functional (sum w f gamma)^2
    double lin(double x) const {
        if (mode == phi) return penalty_weight(beta, alpha, sign, x);
        if (mode == bary) return x;
        return 0.0;
    }
};

double pair_density(double rho, double x, double y) {
    double q = 1.0 - rho * rho;
    return std::exp(-(x * x + y * y - 2.0 * rho * x * y) / (2.0 * q)) / (2.0 * M_PI * std::sqrt(q));
}

} // namespace

VariationReport level_residual(const IntervalUnion& s, const ObjectiveSpec& spec) {
    auto bd = boundary(s);
    if (bd.empty()) throw DomainError("level_residual: empty boundary");
    PenaltyGradient pg(s, spec);
    VariationReport r;
    double lo = kInf, hi = -kInf, sum = 0.0;
    for (const auto& b : bd) {
        auto e = ou_indicator(s, spec.rho, b.location);
        BoundaryRow row;
        row.location = b.location;
        row.normal = b.normal;
        row.level = e.value - pg.term(b.location);
        row.gradient = e.derivative;
        row.aligned = -e.derivative * b.normal >= 0.0;
        lo = std::min(lo, row.level);
        hi = std::max(hi, row.level);
        sum += row.level;
        r.points.push_back(row);
    }
    r.first_variation_residual = hi - lo;
    r.level_constant = sum / double(bd.size());
    return r;
}

double s_operator(const IntervalUnion& s, double rho, const std::vector<double>& f, double x) {
    check_rho01(rho);
    auto bd = boundary(s);
    if (f.size() != bd.size()) throw PreconditionError("s_operator: one value per boundary point required");
    double q = 1.0 - rho * rho, sum = 0.0;
    for (size_t i = 0; i < bd.size(); ++i) {
        double d = bd[i].location - rho * x;
        sum += f[i] * std::exp(-d * d / (2.0 * q));
    }
    return sum * kInvSqrt2Pi / std::sqrt(q);
}

EigenResidual translation_eigen_residual(const IntervalUnion& s, const ObjectiveSpec& spec) {
    check_rho01(spec.rho);
    PenaltyGradient pg(s, spec);
    auto bd = boundary(s);
    std::vector<double> n;
    for (const auto& b : bd) n.push_back(b.normal);
    EigenResidual out;
    for (const auto& b : bd) {
        auto e = ou_indicator(s, spec.rho, b.location);
        double g = pg.grad(b.location);
        double lhs = spec.rho * s_operator(s, spec.rho, n, b.location) + g;
        BoundaryRow row;
        row.location = b.location;
        row.normal = b.normal;
        row.gradient = e.derivative;
        row.eigen_residual = std::abs(lhs - b.normal * std::abs(e.derivative - g));
        row.aligned = -e.derivative * b.normal >= 0.0;
        out.max_residual = std::max(out.max_residual, row.eigen_residual);
        out.points.push_back(row);
    }
    return out;
}

double stability_product_constant(double rho) { return 2.0 / (M_PI * std::sqrt(1.0 - rho * rho)); }

double stability_product_exponent(double rho) { return 1.0 / (1.0 - rho * rho); }

StabilityForm stability_form(const IntervalUnion& s, double rho) {
    check_rho01(rho);
    auto bd = boundary(s);
    StabilityForm out;
    std::vector<double> ones(bd.size(), 1.0);
    double sumR = 0.0, sumL = 0.0, pR = 0.0, pL = 0.0;
    double c = 1.0 - 2.0 * rho * (1.0 - rho) * (1.0 - rho) / (rho * rho + 1.0);
    double k = stability_product_exponent(rho);
    for (const auto& b : bd) {
        auto e = ou_indicator(s, rho, b.location);
        out.value += (rho * s_operator(s, rho, ones, b.location) - std::abs(e.derivative)) * density(b.location);
        if (-e.derivative * b.normal < 0.0) out.sign_condition = false;
        double x2 = b.location * b.location;
        if (b.normal > 0) {
            sumR += std::exp(-0.5 * k * x2);
            pR += std::exp(-0.5 * c * x2);
        } else {
            sumL += std::exp(-0.5 * k * x2);
            pL += std::exp(-0.5 * c * x2);
        }
        for (const auto& b2 : bd)
            if (b.normal > 0 && b2.normal < 0) out.closed_form += 4.0 * rho * pair_density(rho, b.location, b2.location);
    }
    out.product_form = rho * stability_product_constant(rho) * sumR * sumL;
    out.printed_form = rho * 4.0 * std::sqrt(2.0) * (1.0 - rho) / (M_PI * std::sqrt(rho * rho + 1.0)) * pR * pL;
    double a = measure(s);
    double hp = (a > 0.0 && a < 1.0) ? density(phi_inv(a)) : 0.0;
    out.perimeter_gap = perimeter(s) - hp;
    double g = std::max(0.0, out.perimeter_gap);
    out.lemma_bound = rho * (1.0 - rho) * std::min(a, 1.0 - a) / 80.0 * std::max(g, g * g);
    return out;
}

double second_variation_translation(const IntervalUnion& s, const ObjectiveSpec& spec, const std::vector<double>& f) {
    check_rho01(spec.rho);
    auto bd = boundary(s);
    if (f.size() != bd.size()) throw PreconditionError("second_variation_translation: one value per boundary point required");
    double vol = 0.0, scale = 0.0;
    for (size_t i = 0; i < bd.size(); ++i) {
        vol += f[i] * density(bd[i].location);
        scale += std::abs(f[i]);
    }
    if (std::abs(vol) > 1e-10 * std::max(1.0, scale))
        throw PreconditionError("second_variation_translation: sum f gamma_1 must vanish");
    bool all_zero = std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
    if (all_zero) return 0.0;
    PenaltyGradient pg(s, spec);
    double quad = 0.0, lin = 0.0, diag = 0.0;
    for (size_t i = 0; i < bd.size(); ++i) {
        double xi = bd[i].location, gi = density(xi);
        for (size_t j = 0; j < bd.size(); ++j) quad += f[i] * pair_density(spec.rho, xi, bd[j].location) * f[j];
        lin += pg.lin(xi) * f[i] * gi;
        auto e = ou_indicator(s, spec.rho, xi);
        diag += std::abs(e.derivative - pg.grad(xi)) * f[i] * f[i] * gi;
    }
    return quad - pg.eps * lin * lin - diag;
}

SecondVariationSearch second_variation_eigensearch(const IntervalUnion& s, const ObjectiveSpec& spec) {
    check_rho01(spec.rho);
    auto bd = boundary(s);
    int m = int(bd.size());
    SecondVariationSearch out;
    if (m <= 1) {
        out.direction.assign(m, 0.0);
        return out;
    }
    PenaltyGradient pg(s, spec);
    Eigen::MatrixXd M(m, m);
    Eigen::VectorXd w(m), g(m);
    for (int i = 0; i < m; ++i) {
        double xi = bd[i].location;
        g(i) = density(xi);
        w(i) = pg.lin(xi) * g(i);
        for (int j = 0; j < m; ++j) M(i, j) = pair_density(spec.rho, xi, bd[j].location);
        auto e = ou_indicator(s, spec.rho, xi);
        M(i, i) -= std::abs(e.derivative - pg.grad(xi)) * g(i);
    }
    M -= pg.eps * w * w.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd B = Q.rightCols(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.transpose() * M * B);
    int top = m - 2;
    out.max_value = es.eigenvalues()(top);
    Eigen::VectorXd f = B * es.eigenvectors().col(top);
    out.direction.assign(f.data(), f.data() + m);
    return out;
}

double first_variation_translation(const IntervalUnion& s, const ObjectiveSpec& spec) {
    PenaltyGradient pg(s, spec);
    double lin = 0.0, vol = 0.0;
    for (const auto& b : boundary(s)) {
        double g = density(b.location);
        lin += (ou_indicator(s, spec.rho, b.location).value - pg.term(b.location)) * b.normal * g;
        vol += b.normal * g;
    }
    double d = 2.0 * lin;
    if (spec.penalty == PenaltyKind::phi_squared_with_volume) {
        double m = measure(s) - spec.a;
        if (m != 0.0) d -= spec.volume_weight() * (m > 0 ? 1.0 : -1.0) * vol;
    }
    return d;
}

double profile_epsilon_cap(ProfileKind kind, double a, double beta) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("profile: a must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("profile: beta must lie in (0,1)");
    double alpha = -phi_inv(a);
    double q = 1.0 - beta * beta;
    double k = (6.0 + std::abs(alpha)) * (6.0 + std::abs(alpha));
    if (kind == ProfileKind::lemma_finallem2) return std::exp(-alpha * alpha / (1.0 + beta)) * std::sqrt(q) / (8.0 * beta * k);
    return q * q * q / (8.0 * k);
}

double halfspace_profile_h(double t, ProfileKind kind, const ProfileParams& p) {
    double cap = profile_epsilon_cap(kind, p.a, p.beta);
    if (!(p.epsilon >= 0.0 && p.epsilon <= cap)) throw DomainError("halfspace_profile_h: epsilon outside the allowed range");
    double alpha = -phi_inv(p.a);
    double q = 1.0 - p.beta * p.beta;
    double vol = 2.0 * (1.0 + std::abs(alpha)) * std::abs(phi_upper(t) - p.a);
    double pen = 0.0;
    if (p.epsilon > 0.0) {
        if (kind == ProfileKind::lemma_finallem2) {
            double m = integrate_gaussian_interval([&](double x) { return phi((p.beta * x - alpha) / std::sqrt(q)); }, t, kInf).value;
            pen = p.epsilon * m * m;
        } else {
            double m = integrate_gaussian_interval(
                           [&](double x) {
                               double u = p.beta * x - alpha;
                               return (x - alpha * p.beta) * std::exp(-u * u / (2.0 * q));
                           },
                           t, kInf)
                           .value;
            pen = p.epsilon * p.beta / (q * std::sqrt(q)) * m;
        }
    }
    return density(t) + pen + vol;
}

ProfileScan scan_profile(ProfileKind kind, const ProfileParams& p, double lo, double hi, double step) {
    ProfileScan out;
    out.alpha = -phi_inv(p.a);
    out.min_value = kInf;
    long n = long(std::floor((hi - lo) / step + 0.5));
    for (long i = 0; i <= n; ++i) {
        double t = lo + double(i) * step;
        double v = halfspace_profile_h(t, kind, p);
        if (v < out.min_value) {
            out.min_value = v;
            out.argmin = t;
        }
    }
    return out;
}

PerimeterGapReport perimeter_gap_bounds(const IntervalUnion& s, double a, double beta) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("perimeter_gap_bounds: a must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("perimeter_gap_bounds: beta must lie in (0,1)");
    if (std::abs(measure(s) - a) > 1e-10) throw PreconditionError("perimeter_gap_bounds: measure(s) must equal a");
    if (barycenter(s) < 0.0) throw PreconditionError("perimeter_gap_bounds: barycenter must be >= 0");
    double alpha = -phi_inv(a);
    double q = 1.0 - beta * beta;
    double k = (6.0 + std::abs(alpha)) * (6.0 + std::abs(alpha));
    auto bump = [&](double x) {
        double u = beta * x - alpha;
        return std::exp(-u * u / (2.0 * q));
    };
    PerimeterGapReport r;
    r.perimeter_gap = perimeter(s) - density(alpha);
    double side_s = 0.0;
    for (const auto& b : boundary(s)) side_s += bump(b.location) * density(b.location);
    r.lemma7_lhs = std::abs(bump(alpha) * density(alpha) - side_s);
    r.lemma7_rhs = 8.0 * k / (beta * q) * r.perimeter_gap;
    r.lemma7_ok = r.lemma7_lhs <= r.lemma7_rhs + 1e-12;
    if (a <= 0.5) {
        auto hs = IntervalUnion({{alpha, kInf}});
        auto mom = [&](const IntervalUnion& u) {
            double v = 0.0;
            for (const auto& p : u.intervals())
                v += integrate_gaussian_interval([&](double x) { return (x - alpha * beta) * bump(x); }, p.lo, p.hi).value;
            return v;
        };
        r.lemma9_lhs = mom(set_difference(hs, s)) - mom(set_difference(s, hs));
        r.lemma9_rhs = 8.0 * std::exp(alpha * alpha / (1.0 + beta)) * k / (beta * q) * r.perimeter_gap;
        r.lemma9_ok = *r.lemma9_lhs <= *r.lemma9_rhs + 1e-12 && *r.lemma9_lhs >= -1e-9;
    }
    return r;
}

} // namespace gns
