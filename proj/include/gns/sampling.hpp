#pragma once

#include "gns/rng.hpp"
#include "gns/sets_1d.hpp"

#include <vector>

namespace gns {

// Finite endpoints e_1 < ... < e_n, optionally preceded by (-inf and followed by inf).
struct EndpointLayout {
    bool left_ray = false;
    bool right_ray = false;
    int finite = 0;
};

IntervalUnion build_from_endpoints(const EndpointLayout& t, const std::vector<double>& e);

// Overwrites the last finite endpoint so the set has measure a; false when impossible.
bool solve_last_endpoint(const EndpointLayout& t, std::vector<double>& e, double a);

// Up to max_components components, finite endpoints uniform in [lo, hi], rays at random.
IntervalUnion random_interval_union(CounterRng& rng, int max_components, double lo, double hi);

// Same family conditioned on measure a (last endpoint solved); throws InfeasibleError after 1000 draws.
IntervalUnion random_set_with_measure(CounterRng& rng, double a, int max_components, double lo, double hi);

} // namespace gns
