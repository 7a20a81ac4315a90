#pragma once

#include "gns/gaussian_core.hpp"
#include "gns/sets_1d.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gns {

enum class StabilityMethod { quadrature, mehler, monte_carlo };

std::string to_string(StabilityMethod m);
StabilityMethod stability_method_from_string(const std::string& s);

struct StabilityOptions {
    int mehler_terms = 0;           // 0: enough terms for |rho|^N < 1e-17
    long mc_pairs = 10'000'000;
    uint64_t seed = 1;
    double quad_tol = 1e-13;
};

struct StabilityEstimate {
    double value = 0.0;
    double error = 0.0; // quadrature/series bound, or one MC standard deviation
    StabilityMethod method = StabilityMethod::quadrature;
    uint64_t seed = 0;
    long samples = 0;
    int terms = 0;
};

StabilityEstimate noise_stability(const IntervalUnion& s, double rho,
                                  StabilityMethod method = StabilityMethod::quadrature,
                                  const StabilityOptions& opts = {});

// b_k = int 1_s e_k gamma_1, k = 0..n, in closed form.
std::vector<double> indicator_hermite_coeffs(const IntervalUnion& s, int n);

// Monte Carlo over one shared stream of pairs for several sets.
std::vector<StabilityEstimate> noise_stability_mc_batch(const std::vector<IntervalUnion>& sets, double rho,
                                                        long pairs, uint64_t seed);

double halfspace_stability(double a, double rho);

enum class PenaltyKind { phi_squared, phi_squared_with_volume, barycenter_squared, none };

std::string to_string(PenaltyKind p);
PenaltyKind penalty_kind_from_string(const std::string& s);

struct ObjectiveSpec {
    double rho = 0.5;
    double beta = 0.5;
    double epsilon = 0.0;
    double a = 0.5;
    PenaltyKind penalty = PenaltyKind::none;

    void validate() const;
    double alpha() const;
    double volume_weight() const; // 2(1+|alpha|)
};

// sign of the barycenter, AlignmentError when it vanishes.
int barycenter_sign(const IntervalUnion& s);

// W(x) = Phi((beta*sign*x - alpha)/sqrt(1-beta^2)) and its x-derivative.
double penalty_weight(double beta, double alpha, int sign, double x);
double penalty_weight_derivative(double beta, double alpha, int sign, double x);
// int_s W gamma_1
double penalty_mass(const IntervalUnion& s, double beta, double alpha, int sign);

double eta_penalty(const IntervalUnion& s, const HalfSpace1D& h, double beta, double a);
double deficit(const IntervalUnion& s, double rho, double a);
// |z_H|^2 - |z_s|^2 at equal measure
double barycenter_deficit(const IntervalUnion& s);

// exp(-alpha^2 * m) with alpha = 0 mapping to 1 even when m is infinite.
double alpha_weight(double alpha, double m);

struct DeficitReport {
    std::string set;
    double delta = 0.0;
    double eta_beta = 0.0;
    double eta_rho = 0.0;
    double a = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double z = 0.0;
    double z0 = 0.0;
    double lower_constant = 0.0;     // displayed exponent max(1, beta/(rho-beta))
    double lower_constant_alt = 0.0; // exponent max(0, beta/(rho-beta) - 1)
    std::optional<double> lower_constant_special; // a = 1/2, beta = rho
    double tolerance = 0.0;
    bool upper_ok = false;
    bool lower_ok = false;
    bool lower_ok_alt = false;
    std::optional<bool> lower_ok_special;
    uint64_t seed = 0;
};

DeficitReport deficit_report(const IntervalUnion& s, double rho, double beta, double a, double z0);

void to_json(nlohmann::json& j, const DeficitReport& r);
std::string deficit_csv_header();
std::string to_csv_row(const DeficitReport& r);

double objective(const IntervalUnion& s, const ObjectiveSpec& spec);

struct A0Zeta {
    double a0 = 0.0;
    double zeta = 0.0;
};

A0Zeta a0_and_zeta(const IntervalUnion& s, double beta, double a);

// 17 significant digits
std::string format_real(double v);

} // namespace gns
