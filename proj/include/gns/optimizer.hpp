#pragma once

#include "gns/functionals.hpp"
#include "gns/sets_1d.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace gns {

struct SearchConfig {
    int components = 2;     // 1..4
    int restarts = 20;
    int max_iters = 4000;
    double step_tol = 1e-9;
    ObjectiveSpec objective;
    uint64_t seed = 1;
    int threads = 0;        // 0: hardware concurrency

    void validate() const;
};

struct HistoryEntry {
    int restart;
    int iteration;
    double value; // best value of the restart so far
};

struct SearchResult {
    IntervalUnion best_set;
    double best_value = 0.0;
    std::vector<HistoryEntry> history;
    bool is_halfspace = false;
    bool converged = false;
    long evaluations = 0;
};

SearchResult maximize(const SearchConfig& config);

// Half-space test used by SearchResult: one finite boundary point and symmetric
// difference below 1e-4 to the half space of measure a aligned with the barycenter.
bool is_matched_halfspace(const IntervalUnion& s, double a);

struct EpsilonCap {
    double value = 0.0;
    bool degenerate = false; // beta = rho with alpha != 0
};

EpsilonCap epsilon_cap(double rho, double beta, double a, double z0);

void to_json(nlohmann::json& j, const SearchResult& r);

} // namespace gns
