#include "gns/optimizer.hpp"
#include "gns/errors.hpp"
#include "gns/rng.hpp"
#include "gns/sampling.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace gns {

void SearchConfig::validate() const {
    if (components < 1 || components > 4) throw DomainError("SearchConfig: components must be in 1..4");
    if (restarts < 1 || max_iters < 1) throw DomainError("SearchConfig: restarts and max_iters must be positive");
    if (!(step_tol > 0.0)) throw DomainError("SearchConfig: step_tol must be positive");
    objective.validate();
}

bool is_matched_halfspace(const IntervalUnion& s, double a) {
    if (boundary(s).size() != 1) return false;
    double z = barycenter(s);
    auto h = IntervalUnion::from(halfspace_with_measure(a, z > 0.0));
    return symmetric_difference_measure(s, h) < 1e-4;
}

EpsilonCap epsilon_cap(double rho, double beta, double a, double z0) {
    if (!(rho > 0.0 && rho < 1.0 && beta > 0.0 && beta <= rho)) throw DomainError("epsilon_cap: need 0 < beta <= rho < 1");
    if (!(z0 > 0.0)) throw DomainError("epsilon_cap: z0 must be positive");
    double alpha = -phi_inv(a);
    EpsilonCap c;
    double m = beta < rho ? std::max(0.0, beta / (rho - beta) - 1.0) : kInf;
    c.degenerate = beta == rho && alpha != 0.0;
    c.value = (1.0 - rho) * (1.0 - rho) * z0 * z0 / (10.0 * rho) * alpha_weight(alpha, m);
    return c;
}

namespace {

constexpr double kSentinel = 10.0;
constexpr double kBarrier = -1e300;

using Topology = EndpointLayout;

// Canonical form at the evaluator's noise floor: endpoints with negligible outer tail go to
// infinity, negligible components are dropped and negligible gaps filled. Otherwise a sliver
// can outscore the simpler set by rounding alone.
constexpr double kNegligibleMass = 1e-14;

IntervalUnion build(const Topology& t, const std::vector<double>& e) {
    static const double snap = -phi_inv(kNegligibleMass);
    auto raw = build_from_endpoints(t, e);
    std::vector<Interval> v;
    for (const auto& p : raw.intervals()) {
        double lo = p.lo < -snap ? -kInf : (p.lo > snap ? kInf : p.lo);
        double hi = p.hi < -snap ? -kInf : (p.hi > snap ? kInf : p.hi);
        if (gaussian_mass(lo, hi) < kNegligibleMass) continue;
        if (!v.empty() && gaussian_mass(v.back().hi, lo) < kNegligibleMass) v.back().hi = hi;
        else v.push_back({lo, hi});
    }
    return IntervalUnion(std::move(v));
}

bool ordered(const std::vector<double>& e) {
    for (size_t i = 0; i < e.size(); ++i) {
        if (!(std::abs(e[i]) <= kSentinel)) return false;
        if (i && !(e[i] > e[i - 1])) return false;
    }
    return true;
}

bool eliminate(const Topology& t, std::vector<double>& e, double a) { return solve_last_endpoint(t, e, a); }

struct Problem {
    ObjectiveSpec spec;
    bool hard;
    long evals = 0;

    // x holds the free endpoints; returns value and the full endpoint vector
    double value(const Topology& t, const std::vector<double>& x, std::vector<double>* full = nullptr) {
        ++evals;
        std::vector<double> e = x;
        if (hard) {
            e.push_back(0.0);
            if (!ordered(x) || !eliminate(t, e, spec.a)) return kBarrier;
        }
        if (!ordered(e)) return kBarrier;
        if (full) *full = e;
        try {
            return objective(build(t, e), spec);
        } catch (const AlignmentError&) {
            return kBarrier;
        }
    }
};

struct NMOutcome {
    std::vector<double> x;
    double f;
    bool converged;
};

NMOutcome nelder_mead(Problem& P, const Topology& t, std::vector<double> x0, int max_iters, double tol,
                      std::vector<std::pair<int, double>>& hist, int& iter) {
    size_t d = x0.size();
    if (d == 0) {
        double f = P.value(t, x0);
        hist.push_back({iter++, f});
        return {x0, f, true};
    }
    std::vector<std::vector<double>> pts(d + 1, x0);
    std::vector<double> fv(d + 1);
    fv[0] = P.value(t, x0);
    for (size_t i = 0; i < d; ++i) {
        double step = 0.25;
        pts[i + 1][i] += step;
        fv[i + 1] = P.value(t, pts[i + 1]);
        if (fv[i + 1] <= kBarrier) {
            pts[i + 1][i] = x0[i] - step;
            fv[i + 1] = P.value(t, pts[i + 1]);
        }
        if (fv[i + 1] <= kBarrier) {
            pts[i + 1][i] = x0[i] + 0.01;
            fv[i + 1] = P.value(t, pts[i + 1]);
        }
    }
    bool conv = false;
    std::vector<size_t> idx(d + 1);
    for (int it = 0; it < max_iters; ++it) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] > fv[b]; });
        size_t best = idx[0], worst = idx[d], second = idx[d - 1];
        hist.push_back({iter++, fv[best]});
        double diam = 0.0;
        for (size_t k = 1; k <= d; ++k)
            for (size_t j = 0; j < d; ++j) diam = std::max(diam, std::abs(pts[idx[k]][j] - pts[best][j]));
        if (diam < tol && std::abs(fv[best] - fv[worst]) < 1e-14) {
            conv = true;
            break;
        }
        std::vector<double> c(d, 0.0);
        for (size_t k = 0; k < d; ++k)
            for (size_t j = 0; j < d; ++j) c[j] += pts[idx[k]][j] / double(d);
        auto along = [&](double s) {
            std::vector<double> y(d);
            for (size_t j = 0; j < d; ++j) y[j] = c[j] + s * (pts[worst][j] - c[j]);
            return y;
        };
        auto xr = along(-1.0);
        double fr = P.value(t, xr);
        if (fr > fv[best]) {
            auto xe = along(-2.0);
            double fe = P.value(t, xe);
            if (fe > fr) { pts[worst] = xe; fv[worst] = fe; }
            else { pts[worst] = xr; fv[worst] = fr; }
        } else if (fr > fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            auto xc = fr > fv[worst] ? along(-0.5) : along(0.5);
            double fc = P.value(t, xc);
            if (fc > std::max(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (size_t k = 1; k <= d; ++k) {
                    auto& p = pts[idx[k]];
                    for (size_t j = 0; j < d; ++j) p[j] = pts[best][j] + 0.5 * (p[j] - pts[best][j]);
                    fv[idx[k]] = P.value(t, p);
                }
            }
        }
    }
    size_t b = std::max_element(fv.begin(), fv.end()) - fv.begin();
    return {pts[b], fv[b], conv};
}

struct RestartResult {
    Topology topo;
    std::vector<double> ends;
    double value = kBarrier;
    bool converged = false;
    std::vector<std::pair<int, double>> hist;
    long evals = 0;
};

// Topology reductions: drop a component, close a gap, or send an endpoint to infinity.
std::vector<std::pair<Topology, std::vector<double>>> reductions(const Topology& t, const std::vector<double>& e) {
    std::vector<std::pair<Topology, std::vector<double>>> out;
    int n = t.finite;
    for (int i = 0; i + 1 < n; ++i) {
        std::vector<double> r = e;
        r.erase(r.begin() + i, r.begin() + i + 2);
        Topology u = t;
        u.finite = n - 2;
        if (u.finite > 0 || (u.left_ray != u.right_ray)) out.push_back({u, r});
    }
    if (n >= 1) {
        if (!t.left_ray) { // first endpoint is a left end: replace by a ray
            std::vector<double> r(e.begin() + 1, e.end());
            Topology u{true, t.right_ray, n - 1};
            if (u.finite > 0 || !u.right_ray) out.push_back({u, r});
        }
        if (!t.right_ray) {
            std::vector<double> r(e.begin(), e.end() - 1);
            Topology u{t.left_ray, true, n - 1};
            if (u.finite > 0 || !u.left_ray) out.push_back({u, r});
        }
    }
    // drop a ray component outright
    if (t.left_ray && n >= 1) out.push_back({Topology{false, t.right_ray, n - 1}, std::vector<double>(e.begin() + 1, e.end())});
    if (t.right_ray && n >= 1) out.push_back({Topology{t.left_ray, false, n - 1}, std::vector<double>(e.begin(), e.end() - 1)});
    std::vector<std::pair<Topology, std::vector<double>>> valid;
    for (auto& c : out)
        if (c.first.finite >= 1) valid.push_back(c);
    return valid;
}

RestartResult run_restart(const SearchConfig& cfg, int r) {
    Problem P{cfg.objective, cfg.objective.penalty != PenaltyKind::phi_squared_with_volume};
    CounterRng rng(derive_seed(cfg.seed, uint64_t(r)));
    RestartResult out;
    int iter = 0;
    std::vector<double> x;
    Topology t;
    bool ok = false;
    for (int draw = 0; draw < 100 && !ok; ++draw) {
        t.left_ray = rng.uniform() < 0.5;
        t.right_ray = rng.uniform() < 0.5;
        t.finite = 2 * cfg.components - int(t.left_ray) - int(t.right_ray);
        if (t.finite < 1) continue;
        std::vector<double> e(t.finite);
        for (auto& v : e) v = rng.uniform(-3.0, 3.0);
        std::sort(e.begin(), e.end());
        x = e;
        if (P.hard) x.pop_back();
        ok = P.value(t, x) > kBarrier;
    }
    if (!ok) throw InfeasibleError("maximize: no feasible start after 100 draws");

    auto free_part = [&](const std::vector<double>& e) {
        std::vector<double> y = e;
        if (P.hard) y.pop_back();
        return y;
    };
    auto nm = nelder_mead(P, t, x, cfg.max_iters, cfg.step_tol, out.hist, iter);
    std::vector<double> full;
    P.value(t, nm.x, &full);
    double fbest = nm.f;
    bool conv = nm.converged;
    // reductions may trade a hair of value for a simpler topology; report the best state seen
    Topology keep_t = t;
    std::vector<double> keep_e = full;
    double keep_f = fbest;
    bool keep_conv = conv;
    for (int round = 0; round < 8; ++round) {
        double cand_best = kBarrier;
        Topology ct;
        std::vector<double> ce;
        for (auto& [u, e] : reductions(t, full)) {
            std::vector<double> y = free_part(e), fe;
            double f = P.value(u, y, &fe);
            if (f > cand_best) {
                cand_best = f;
                ct = u;
                ce = fe;
            }
        }
        if (!(cand_best >= fbest - 1e-9)) break;
        t = ct;
        auto again = nelder_mead(P, t, free_part(ce), cfg.max_iters, cfg.step_tol, out.hist, iter);
        P.value(t, again.x, &full);
        fbest = again.f;
        conv = again.converged;
        if (fbest >= keep_f) {
            keep_t = t;
            keep_e = full;
            keep_f = fbest;
            keep_conv = conv;
        }
    }
    double run = kBarrier;
    for (auto& h : out.hist) {
        run = std::max(run, h.second);
        h.second = run;
    }
    out.topo = keep_t;
    out.ends = keep_e;
    out.value = keep_f;
    out.converged = keep_conv;
    out.evals = P.evals;
    return out;
}

} // namespace

SearchResult maximize(const SearchConfig& config) {
    config.validate();
    std::vector<RestartResult> runs(config.restarts);
    int nt = config.threads > 0 ? config.threads : int(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, config.restarts);
    std::vector<std::exception_ptr> errs(config.restarts);
    auto work = [&](int w) {
        for (int r = w; r < config.restarts; r += nt) {
            try {
                runs[r] = run_restart(config, r);
            } catch (...) {
                errs[r] = std::current_exception();
            }
        }
    };
    if (nt <= 1) work(0);
    else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    SearchResult res;
    res.best_value = kBarrier;
    for (int r = 0; r < config.restarts; ++r) {
        const auto& run = runs[r];
        for (const auto& h : run.hist) res.history.push_back({r, h.first, h.second});
        res.evaluations += run.evals;
        if (run.value > res.best_value) {
            res.best_value = run.value;
            res.best_set = build(run.topo, run.ends);
            res.converged = run.converged;
        }
    }
    res.is_halfspace = is_matched_halfspace(res.best_set, config.objective.a);
    return res;
}

void to_json(nlohmann::json& j, const SearchResult& r) {
    j = nlohmann::json{{"best_set", r.best_set.to_string()}, {"best_value", r.best_value},
                       {"is_halfspace", r.is_halfspace}, {"converged", r.converged},
                       {"evaluations", r.evaluations}};
    auto h = nlohmann::json::array();
    for (const auto& e : r.history) h.push_back({e.restart, e.iteration, e.value});
    j["history"] = h;
}

} // namespace gns
