#pragma once

#include "gns/gaussian_core.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gns {

inline constexpr int kMaxHermiteOrder = 400;

// h_k with generating function exp(lambda x - lambda^2/2); h_{k+1}' = h_k.
double hermite_eval(int k, double x);
// e_k = h_k sqrt(k!), orthonormal in L2(gamma_1).
double hermite_normalized(int k, double x);
// e_0..e_n at x.
std::vector<double> hermite_normalized_all(int n, double x);

double mehler_kernel_1d(double rho, double x, double y, int trunc);
double mehler_kernel_closed(double rho, double x, double y);

enum class SeriesKind { phi_expansion, gaussian_expansion, gaussian_derivative_expansion };

std::string to_string(SeriesKind k);
SeriesKind series_kind_from_string(const std::string& s);

struct HermiteSeries {
    double beta = 0.0;
    double alpha = 0.0;
    SeriesKind kind = SeriesKind::phi_expansion;
    std::vector<double> coeffs;
    double noise = 0.0; // absolute accuracy of each coefficient (projection rounding and rule difference)

    int truncation_order() const { return int(coeffs.size()) - 1; }
    double evaluate(double x) const;
    double l2_norm() const;
};

void to_json(nlohmann::json& j, const HermiteSeries& s);
void from_json(const nlohmann::json& j, HermiteSeries& s);

// Target functions of the three expansions.
double phi_penalty_target(double beta, double alpha, double x);
double gaussian_bump_target(double beta, double alpha, double x);
double gaussian_derivative_target(double beta, double alpha, double x);

// Projection quadrature; nodes = 0 picks a Gauss-Hermite size from N.
HermiteSeries expand_phi_penalty(double beta, double alpha, int N = 100, int nodes = 0);
HermiteSeries expand_gaussian_bump(double beta, double alpha, int N = 100, int nodes = 0);
HermiteSeries expand_gaussian_derivative(double beta, double alpha, int N = 100, int nodes = 0);

struct CoefficientEnvelope {
    double beta = 0.5;
    double lambda = 0.25;
    double alpha = 0.0;
    SeriesKind kind = SeriesKind::phi_expansion;

    double operator()(int k) const;
};

struct EnvelopeCheck {
    bool passed = true;
    std::optional<int> first_violation;
    double worst_ratio = 0.0; // max |c_k| / envelope(k)
};

// |c_k| <= envelope(k) + series.noise; coefficients below the projection's accuracy cannot violate.
EnvelopeCheck check_envelope(const HermiteSeries& series, const CoefficientEnvelope& env);

} // namespace gns
