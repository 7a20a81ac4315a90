#pragma once

#include "gns/gaussian_core.hpp"
#include "gns/sets_1d.hpp"

#include <cstdint>

namespace gns {

struct OUEvaluation {
    double rho = 0.0;
    double value = 0.0;
    double derivative = 0.0;
    double second_derivative = 0.0;
    uint64_t set_hash = 0;
};

// T_rho 1_s at x and its first two x-derivatives, in closed form.
OUEvaluation ou_indicator(const IntervalUnion& s, double rho, double x);

// T_rho f(x) by Gauss-Hermite quadrature.
double ou_apply(const RealFn& f, double rho, double x, int nodes = 200);

double semigroup_check(const IntervalUnion& s, double rho1, double rho2, double x);
double heat_equation_residual(const IntervalUnion& s, double rho, double x, double h);

} // namespace gns
