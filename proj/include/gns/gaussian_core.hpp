#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace gns {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// gamma_1 density; 0 at +-inf.
double density(double t);
// Phi(t) = gamma_1(-inf, t].
double phi(double t);
// 1 - Phi(t), accurate in the upper tail.
double phi_upper(double t);
double phi_inv(double p);

// gamma_1(lo, hi] without cancellation in either tail.
double gaussian_mass(double lo, double hi);

struct GaussianMoment {
    double measure = 0.0;
    double first_moment = 0.0;
};

GaussianMoment gaussian_moment(double lo, double hi);

enum class QuadratureScheme { gauss_hermite, tanh_sinh, adaptive_simpson };

struct QuadratureSpec {
    QuadratureScheme scheme = QuadratureScheme::gauss_hermite;
    int node_count = 200;
    double abs_tol = 1e-11;
    double rel_tol = 0.0;

    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

using RealFn = std::function<double(double)>;

// Integral of f against gamma_1 over the line.
Estimate integrate_gaussian(const RealFn& f, const QuadratureSpec& spec = {});

// Integral of f * gamma_1 over [lo, hi]; infinite ends are cut where gamma_1 underflows
// far below double resolution. Adaptive Gauss-Kronrod; tol is absolute.
Estimate integrate_gaussian_interval(const RealFn& f, double lo, double hi, double tol = 1e-14);

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights; // sum to 1 (probabilists' weight gamma_1)
};

// Cached per node count; thread safe.
const GaussHermiteRule& gauss_hermite_rule(int n);

} // namespace gns
