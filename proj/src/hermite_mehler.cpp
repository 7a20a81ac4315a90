#include "gns/hermite_mehler.hpp"
#include "gns/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

namespace gns {

double hermite_eval(int k, double x) {
    if (k < 0 || k > kMaxHermiteOrder) throw DomainError("hermite_eval: order outside [0,400]");
    // (j+1) h_{j+1} = x h_j - h_{j-1}
    double h0 = 1.0, h1 = x;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        double h2 = (x * h1 - h0) / double(j + 1);
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hermite_normalized(int k, double x) {
    if (k < 0 || k > kMaxHermiteOrder) throw DomainError("hermite_normalized: order outside [0,400]");
    return hermite_normalized_all(k, x)[k];
}

std::vector<double> hermite_normalized_all(int n, double x) {
    std::vector<double> e(n + 1);
    e[0] = 1.0;
    if (n >= 1) e[1] = x;
    for (int k = 1; k < n; ++k) e[k + 1] = (x * e[k] - std::sqrt(double(k)) * e[k - 1]) / std::sqrt(double(k + 1));
    return e;
}

double mehler_kernel_1d(double rho, double x, double y, int trunc) {
    if (trunc < 0) throw DomainError("mehler_kernel_1d: negative truncation");
    auto ex = hermite_normalized_all(trunc, x);
    auto ey = hermite_normalized_all(trunc, y);
    double s = 0.0, p = 1.0;
    for (int k = 0; k <= trunc; ++k) {
        s += p * (ex[k] * ey[k]); // grouped so swapping x and y is bit-exact
        p *= rho;
    }
    return s * std::exp(-0.5 * (x * x + y * y));
}

double mehler_kernel_closed(double rho, double x, double y) {
    double q = 1.0 - rho * rho;
    return std::exp((-x * x - y * y + 2.0 * rho * x * y) / (2.0 * q)) / std::sqrt(q);
}

std::string to_string(SeriesKind k) {
    switch (k) {
    case SeriesKind::phi_expansion: return "phi_expansion";
    case SeriesKind::gaussian_expansion: return "gaussian_expansion";
    case SeriesKind::gaussian_derivative_expansion: return "gaussian_derivative_expansion";
    }
    return "?";
}

SeriesKind series_kind_from_string(const std::string& s) {
    if (s == "phi_expansion") return SeriesKind::phi_expansion;
    if (s == "gaussian_expansion") return SeriesKind::gaussian_expansion;
    if (s == "gaussian_derivative_expansion") return SeriesKind::gaussian_derivative_expansion;
    throw ParseError("unknown series kind: " + s);
}

double HermiteSeries::evaluate(double x) const {
    if (coeffs.empty()) return 0.0;
    auto e = hermite_normalized_all(int(coeffs.size()) - 1, x);
    double s = 0.0;
    for (size_t k = coeffs.size(); k-- > 0;) s += coeffs[k] * e[k];
    return s;
}

double HermiteSeries::l2_norm() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
}

void to_json(nlohmann::json& j, const HermiteSeries& s) {
    j = nlohmann::json{{"beta", s.beta}, {"alpha", s.alpha}, {"kind", to_string(s.kind)}, {"coeffs", s.coeffs}, {"noise", s.noise}};
}

void from_json(const nlohmann::json& j, HermiteSeries& s) {
    s.beta = j.at("beta").get<double>();
    s.alpha = j.at("alpha").get<double>();
    s.kind = series_kind_from_string(j.at("kind").get<std::string>());
    s.coeffs = j.at("coeffs").get<std::vector<double>>();
    s.noise = j.value("noise", 0.0);
}

double phi_penalty_target(double beta, double alpha, double x) {
    return phi((beta * x - alpha) / std::sqrt(1.0 - beta * beta));
}

double gaussian_bump_target(double beta, double alpha, double x) {
    double q = 1.0 - beta * beta;
    double u = beta * x - alpha;
    return std::exp(-u * u / (2.0 * q)) / std::sqrt(q);
}

// Carries the factor beta of d/dx of the bump; the stated c''_0, c''_1 need it.
double gaussian_derivative_target(double beta, double alpha, double x) {
    double q = 1.0 - beta * beta;
    double u = beta * x - alpha;
    return beta * (alpha - beta * x) * std::exp(-u * u / (2.0 * q)) / (q * std::sqrt(q));
}

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("expansion: beta must lie in (0,1)");
}

std::vector<double> project(const RealFn& f, int N, int nodes, double& noise) {
    if (N < 0 || N > kMaxHermiteOrder) throw DomainError("expansion: order outside [0,400]");
    int n = nodes > 0 ? nodes : std::min(500, std::max(200, 2 * N + 64));
    double mass = 0.0; // sum |w f|, scale of the rounding in each coefficient
    auto run = [&](int m) {
        const auto& r = gauss_hermite_rule(m);
        std::vector<double> c(N + 1, 0.0);
        for (size_t i = 0; i < r.nodes.size(); ++i) {
            double w = r.weights[i] * f(r.nodes[i]);
            if (w == 0.0) continue;
            if (m == n) mass += std::abs(w);
            auto e = hermite_normalized_all(N, r.nodes[i]);
            for (int k = 0; k <= N; ++k) c[k] += w * e[k];
        }
        return c;
    };
    auto c = run(n);
    auto c2 = run(std::max(8, n - 40));
    double diff = 0.0, best = 0.0;
    for (int k = 0; k <= N; ++k) diff = std::max(diff, std::abs(c[k] - c2[k]));
    for (double v : c) best = std::max(best, std::abs(v));
    if (diff > 1e-11 * std::max(1.0, best))
        throw ConvergenceError("expansion: projection quadrature did not settle", c.empty() ? 0.0 : c[0], diff);
    noise = std::max(diff, 64.0 * std::numeric_limits<double>::epsilon() * mass);
    return c;
}

} // namespace

HermiteSeries expand_phi_penalty(double beta, double alpha, int N, int nodes) {
    check_beta(beta);
    HermiteSeries out{beta, alpha, SeriesKind::phi_expansion, {}};
    out.coeffs = project([=](double x) { return phi_penalty_target(beta, alpha, x); }, N, nodes, out.noise);
    return out;
}

HermiteSeries expand_gaussian_bump(double beta, double alpha, int N, int nodes) {
    check_beta(beta);
    HermiteSeries out{beta, alpha, SeriesKind::gaussian_expansion, {}};
    out.coeffs = project([=](double x) { return gaussian_bump_target(beta, alpha, x); }, N, nodes, out.noise);
    return out;
}

HermiteSeries expand_gaussian_derivative(double beta, double alpha, int N, int nodes) {
    check_beta(beta);
    HermiteSeries out{beta, alpha, SeriesKind::gaussian_derivative_expansion, {}};
    out.coeffs = project([=](double x) { return gaussian_derivative_target(beta, alpha, x); }, N, nodes, out.noise);
    return out;
}

double CoefficientEnvelope::operator()(int k) const {
    double v = std::pow(beta + lambda, k) * std::exp(alpha * alpha * std::max(0.0, beta / (2.0 * lambda) - 0.5));
    if (kind == SeriesKind::gaussian_derivative_expansion) v *= std::sqrt(double(k));
    return v;
}

EnvelopeCheck check_envelope(const HermiteSeries& series, const CoefficientEnvelope& env) {
    EnvelopeCheck out;
    int kmin = env.kind == SeriesKind::phi_expansion ? 2 : 1;
    for (int k = kmin; k < int(series.coeffs.size()); ++k) {
        double bound = env(k);
        double ratio = std::abs(series.coeffs[k]) / bound;
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (std::abs(series.coeffs[k]) > bound + series.noise && !out.first_violation) {
            out.passed = false;
            out.first_violation = k;
        }
    }
    return out;
}

} // namespace gns
