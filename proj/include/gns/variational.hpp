#pragma once

#include "gns/functionals.hpp"
#include "gns/sets_1d.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <vector>

namespace gns {

struct BoundaryRow {
    double location = 0.0;
    int normal = 0;
    double level = 0.0;    // L(x)
    double gradient = 0.0; // d/dx T_rho 1_s
    double eigen_residual = 0.0;
    bool aligned = false;  // -d/dx T_rho 1_s has the sign of N
};

struct VariationReport {
    double first_variation_residual = 0.0;
    double level_constant = 0.0;
    double second_variation = 0.0;
    std::optional<double> closed_form;
    std::optional<double> oracle_value;
    std::vector<BoundaryRow> points;
};

void to_json(nlohmann::json& j, const VariationReport& r);

// L(x) = T_rho 1_s(x) minus the penalty gradient term of spec at every boundary point.
VariationReport level_residual(const IntervalUnion& s, const ObjectiveSpec& spec);

// f holds one value per boundary point, in boundary(s) order.
double s_operator(const IntervalUnion& s, double rho, const std::vector<double>& f, double x);

struct EigenResidual {
    double max_residual = 0.0;
    std::vector<BoundaryRow> points;
};

EigenResidual translation_eigen_residual(const IntervalUnion& s, const ObjectiveSpec& spec);

struct StabilityForm {
    double value = 0.0;         // direct boundary sum
    double closed_form = 0.0;   // 4 rho sum_{R x L} p_rho(x,y); equals value under the sign condition
    double product_form = 0.0;  // rho A(rho) (sum_R w)(sum_L w), calibrated on {0, sigma}
    double printed_form = 0.0;  // product shape with the printed constants
    bool sign_condition = true;
    double perimeter_gap = 0.0;
    double lemma_bound = 0.0;   // rho(1-rho) min(a,1-a)/80 max(gap, gap^2)
};

StabilityForm stability_form(const IntervalUnion& s, double rho);
// frozen calibration of the product shape
double stability_product_constant(double rho);
double stability_product_exponent(double rho);

// Quadratic form of the second variation in 1-D with boundary values f (sum f gamma_1 = 0).
double second_variation_translation(const IntervalUnion& s, const ObjectiveSpec& spec, const std::vector<double>& f);

struct SecondVariationSearch {
    double max_value = 0.0;
    std::vector<double> direction; // unit Euclidean norm, volume orthogonal
};

SecondVariationSearch second_variation_eigensearch(const IntervalUnion& s, const ObjectiveSpec& spec);

// d/ds objective(s + shift) at shift 0.
double first_variation_translation(const IntervalUnion& s, const ObjectiveSpec& spec);

enum class ProfileKind { lemma_finallem2, lemma_finallem3 };

struct ProfileParams {
    double a = 0.5;
    double beta = 0.5;
    double epsilon = 0.0;
};

double profile_epsilon_cap(ProfileKind kind, double a, double beta);
double halfspace_profile_h(double t, ProfileKind kind, const ProfileParams& p);

struct ProfileScan {
    double argmin = 0.0;
    double min_value = 0.0;
    double alpha = 0.0;
};

ProfileScan scan_profile(ProfileKind kind, const ProfileParams& p, double lo = -6.0, double hi = 6.0, double step = 1e-3);

struct PerimeterGapReport {
    double perimeter_gap = 0.0;
    double lemma7_lhs = 0.0;
    double lemma7_rhs = 0.0;
    bool lemma7_ok = false;
    std::optional<double> lemma9_lhs; // only for a <= 1/2
    std::optional<double> lemma9_rhs;
    std::optional<bool> lemma9_ok;
};

PerimeterGapReport perimeter_gap_bounds(const IntervalUnion& s, double a, double beta);

} // namespace gns
