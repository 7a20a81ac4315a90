#include "gns/sampling.hpp"
#include "gns/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gns {

IntervalUnion build_from_endpoints(const EndpointLayout& t, const std::vector<double>& e) {
    std::vector<Interval> v;
    size_t i = 0, stop = e.size() - (t.right_ray ? 1 : 0);
    if (t.left_ray) v.push_back({-kInf, e[i++]});
    for (; i + 2 <= stop; i += 2) v.push_back({e[i], e[i + 1]});
    if (t.right_ray) v.push_back({e[i], kInf});
    return IntervalUnion(std::move(v));
}

bool solve_last_endpoint(const EndpointLayout& t, std::vector<double>& e, double a) {
    int n = t.finite;
    if (n < 1 || int(e.size()) != n) return false;
    double prev = n >= 2 ? e[n - 2] : -kInf;
    if (t.right_ray) { // last component [e_n, inf)
        std::vector<double> head(e.begin(), e.begin() + (n - 1));
        double other = n >= 2 ? measure(build_from_endpoints({t.left_ray, false, n - 1}, head)) : 0.0;
        double r = a - other;
        if (!(r > 0.0 && r < phi_upper(prev))) return false;
        e[n - 1] = -phi_inv(r);
    } else if (n == 1) { // (-inf, e_1]
        if (!t.left_ray || !(a > 0.0 && a < 1.0)) return false;
        e[0] = phi_inv(a);
    } else { // last component [e_{n-1}, e_n]
        std::vector<double> head(e.begin(), e.begin() + (n - 2));
        double other = n >= 3 ? measure(build_from_endpoints({t.left_ray, false, n - 2}, head)) : 0.0;
        double r = a - other;
        double up = phi_upper(prev);
        if (!(r > 0.0 && r < up)) return false;
        e[n - 1] = prev > 0.0 ? -phi_inv(up - r) : phi_inv(phi(prev) + r);
    }
    return std::isfinite(e[n - 1]) && (n < 2 || e[n - 1] > prev);
}

namespace {

EndpointLayout draw_layout(CounterRng& rng, int max_components, std::vector<double>& e, double lo, double hi) {
    for (;;) {
        int m = 1 + int(rng.uniform() * max_components);
        EndpointLayout t{rng.uniform() < 0.5, rng.uniform() < 0.5, 0};
        t.finite = 2 * m - int(t.left_ray) - int(t.right_ray);
        if (t.finite < 1) continue;
        e.resize(t.finite);
        for (auto& v : e) v = rng.uniform(lo, hi);
        std::sort(e.begin(), e.end());
        return t;
    }
}

} // namespace

IntervalUnion random_interval_union(CounterRng& rng, int max_components, double lo, double hi) {
    std::vector<double> e;
    auto t = draw_layout(rng, max_components, e, lo, hi);
    return build_from_endpoints(t, e);
}

IntervalUnion random_set_with_measure(CounterRng& rng, double a, int max_components, double lo, double hi) {
    for (int draw = 0; draw < 1000; ++draw) {
        std::vector<double> e;
        auto t = draw_layout(rng, max_components, e, lo, hi);
        if (solve_last_endpoint(t, e, a)) {
            auto s = build_from_endpoints(t, e);
            if (std::abs(measure(s) - a) <= 1e-12) return s;
        }
    }
    throw InfeasibleError("random_set_with_measure: no feasible draw");
}

} // namespace gns
