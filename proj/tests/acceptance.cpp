// One line per acceptance criterion; exit status 1 if any fails.
#include "gns/functionals.hpp"
#include "gns/hermite_mehler.hpp"
#include "gns/optimizer.hpp"
#include "gns/ou_operator.hpp"
#include "gns/rng.hpp"
#include "gns/sampling.hpp"
#include "gns/variational.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>

using namespace gns;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

std::set<int> failed;

void report(int id, const std::string& name, const std::function<Outcome()>& fn) {
    auto t0 = Clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) failed.insert(id);
    std::printf("%s criterion %d: %s [%s; %.1fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome mehler_identity() {
    auto t0 = Clock::now();
    double worst = 0.0;
    for (double rho : {0.3, 0.6, 0.9})
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                double x = -4 + 0.4 * i, y = -4 + 0.4 * j;
                worst = std::max(worst, std::abs(mehler_kernel_1d(rho, x, y, 200) - mehler_kernel_closed(rho, x, y)));
            }
    double t = elapsed(t0);
    return {worst <= 1e-9 && t < 5.0, fmt("max error %.3g, %.2fs", worst, t)};
}

Outcome evaluator_agreement() {
    auto t0 = Clock::now();
    CounterRng rng(derive_seed(2024, 2));
    std::vector<IntervalUnion> sets;
    for (int i = 0; i < 200; ++i) sets.push_back(random_interval_union(rng, 4, -4, 4));
    double worst_qm = 0.0, worst_sigma = 0.0;
    for (double rho : {0.2, 0.5, 0.8}) {
        auto mc = noise_stability_mc_batch(sets, rho, 10'000'000, 1000 + uint64_t(rho * 10));
        for (size_t i = 0; i < sets.size(); ++i) {
            StabilityOptions o;
            o.mehler_terms = 150;
            double q = noise_stability(sets[i], rho).value;
            double m = noise_stability(sets[i], rho, StabilityMethod::mehler, o).value;
            worst_qm = std::max(worst_qm, std::abs(q - m));
            worst_sigma = std::max(worst_sigma, std::abs(mc[i].value - q) / mc[i].error);
        }
    }
    double t = elapsed(t0);
    return {worst_qm <= 1e-8 && worst_sigma <= 4.0 && t < 120.0,
            fmt("quad-mehler %.3g, worst MC deviation %.2f sigma, %.1fs", worst_qm, worst_sigma, t)};
}

Outcome borell() {
    CounterRng rng(derive_seed(7, 3));
    int violations = 0, n = 0;
    double worst = -1.0;
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double a : {0.2, 0.5, 0.8}) {
            double h = halfspace_stability(a, rho);
            for (int i = 0; i < 100; ++i, ++n) {
                // half-space draws would pass trivially
                auto s = random_set_with_measure(rng, a, 4, -4, 4);
                while (boundary(s).size() < 2) s = random_set_with_measure(rng, a, 4, -4, 4);
                double d = noise_stability(s, rho).value - h;
                worst = std::max(worst, d);
                if (d > 1e-8) ++violations;
            }
        }
    return {violations == 0 && n == 1500, fmt("%g sets, %g violations, max excess %.3g", n, violations, worst)};
}

Outcome sandwich() {
    CounterRng rng(derive_seed(7, 4));
    int n = 0, up = 0, low = 0;
    for (double rho : {0.3, 0.5, 0.7}) {
        int k = 0;
        while (k < (rho == 0.5 ? 168 : 166)) {
            auto s = random_set_with_measure(rng, 0.5, 4, -4, 4);
            double z = barycenter(s);
            if (std::abs(z) < 0.05 || boundary(s).size() < 2) continue;
            ++k;
            ++n;
            auto r = deficit_report(s, rho, rho, 0.5, std::abs(z));
            if (!(r.delta <= 2 * r.eta_rho + 1e-8)) ++up;
            double c = 1e-9 * rho * rho * z * z * std::pow(1 - rho * rho, 2);
            if (!(c * r.eta_rho <= r.delta + 1e-8)) ++low;
        }
    }
    return {n == 500 && up == 0 && low == 0, fmt("%g sets, upper violations %g, lower violations %g", n, up, low)};
}

Outcome hermite() {
    int env_fail = 0, env_checks = 0;
    for (double beta : {0.2, 0.3, 0.45, 0.6, 0.8})
        for (double lambda : {0.05, 0.1, 0.2, 0.3, 0.45})
            for (double alpha : {-1.0, 0.0, 0.5, 1.0}) {
                if (lambda > beta || beta + lambda > 0.9 + 1e-12) continue;
                HermiteSeries ser[3] = {expand_phi_penalty(beta, alpha, 60), expand_gaussian_bump(beta, alpha, 60),
                                        expand_gaussian_derivative(beta, alpha, 60)};
                SeriesKind kinds[3] = {SeriesKind::phi_expansion, SeriesKind::gaussian_expansion,
                                       SeriesKind::gaussian_derivative_expansion};
                for (int k = 0; k < 3; ++k) {
                    ++env_checks;
                    if (!check_envelope(ser[k], CoefficientEnvelope{beta, lambda, alpha, kinds[k]}).passed) ++env_fail;
                }
            }
    double parseval = 0.0;
    for (double beta : {0.2, 0.5, 0.8})
        for (double alpha : {-1.0, 0.0, 0.7}) {
            auto s = expand_phi_penalty(beta, alpha, 80);
            QuadratureSpec q;
            q.scheme = QuadratureScheme::tanh_sinh;
            q.abs_tol = 1e-12;
            double ref = integrate_gaussian(
                             [&](double x) {
                                 double v = phi_penalty_target(beta, alpha, x);
                                 return v * v;
                             },
                             q)
                             .value;
            parseval = std::max(parseval, std::abs(s.l2_norm() * s.l2_norm() - ref));
        }
    double ladder = 0.0;
    const double h = 1e-5;
    for (int k = 0; k <= 50; ++k)
        for (double x : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
            double fd = (hermite_eval(k + 1, x + h) - hermite_eval(k + 1, x - h)) / (2 * h);
            ladder = std::max(ladder, std::abs(fd - hermite_eval(k, x)) / std::max(1.0, std::abs(hermite_eval(k, x))));
        }
    return {env_fail == 0 && parseval <= 1e-8 && ladder <= 1e-6,
            fmt("envelope failures %g, Parseval %.3g, ladder %.3g", env_fail, parseval, ladder) + " of " +
                std::to_string(env_checks) + " envelope checks"};
}

Outcome variational() {
    CounterRng rng(derive_seed(7, 6));
    double div = 0.0;
    int sets = 0;
    while (sets < 50) {
        auto s = random_interval_union(rng, 4, -4, 4);
        if (boundary(s).empty()) continue;
        ++sets;
        double rho = rng.uniform(0.05, 0.95);
        std::vector<double> n;
        for (auto& b : boundary(s)) n.push_back(b.normal);
        for (int i = 0; i < 20; ++i) {
            double x = rng.uniform(-4, 4);
            div = std::max(div, std::abs(rho * s_operator(s, rho, n, x) + ou_indicator(s, rho, x).derivative));
        }
    }
    int neg = 0, zero_nonhalf = 0, lemma_fail = 0, n = 0;
    double worst_short = 0.0;
    std::string worst_case;
    for (int i = 0; i < 500; ++i, ++n) {
        auto s = random_interval_union(rng, 4, -4, 4);
        double rho = 0.1 + 0.8 * (i % 9) / 8.0;
        auto f = stability_form(s, rho);
        if (f.value < -1e-10) ++neg;
        // the direct sum cancels down to rounding when every pair is far apart; under the sign
        // condition the closed form is the same number without cancellation
        double positive = f.sign_condition ? f.closed_form : f.value;
        if (boundary(s).size() >= 2 && !(positive > 0.0)) ++zero_nonhalf;
        if (f.value < f.lemma_bound - 1e-12) {
            ++lemma_fail;
            double short_by = f.lemma_bound - f.value;
            if (short_by > worst_short) {
                worst_short = short_by;
                worst_case = s.to_string() + fmt(" at rho %.3g (form %.3g, bound %.3g)", rho, f.value, f.lemma_bound);
            }
        }
    }
    for (double a : {0.2, 0.5, 0.8})
        if (std::abs(stability_form(IntervalUnion::from(halfspace_with_measure(a, true)), 0.5).value) > 1e-15) ++zero_nonhalf;
    return {div <= 1e-10 && neg == 0 && zero_nonhalf == 0 && lemma_fail == 0,
            fmt("divergence %.3g, negative forms %g, zero forms off half spaces %g", div, neg, zero_nonhalf) +
                ", lemma bound failures " + std::to_string(lemma_fail) + "/" + std::to_string(n) +
                (worst_case.empty() ? "" : ", worst " + worst_case)};
}

Outcome first_variation() {
    CounterRng rng(derive_seed(7, 7));
    double worst = 0.0;
    int n = 0;
    while (n < 50) {
        auto s = random_interval_union(rng, 3, -3, 3);
        if (boundary(s).empty() || std::abs(barycenter(s)) < 1e-3) continue;
        ObjectiveSpec spec;
        spec.rho = rng.uniform(0.2, 0.8);
        spec.beta = spec.rho / 2;
        spec.a = std::clamp(measure(s) + (rng.uniform() < 0.5 ? -0.05 : 0.05), 0.05, 0.95);
        spec.epsilon = 0.05 * rng.uniform();
        spec.penalty = PenaltyKind::phi_squared_with_volume;
        const double h = 1e-4;
        auto shift = [&](double d) {
            std::vector<Interval> v;
            for (auto& p : s.intervals()) v.push_back({p.lo + d, p.hi + d});
            return IntervalUnion(v);
        };
        double fd = (objective(shift(h), spec) - objective(shift(-h), spec)) / (2 * h);
        double an = first_variation_translation(s, spec);
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
        ++n;
    }
    return {worst <= 1e-4, fmt("worst relative error %.3g over %g sets", worst, n)};
}

Outcome optimizer_halfspaces() {
    auto t0 = Clock::now();
    int ok = 0, total = 0;
    double worst_gap = 0.0;
    for (double rho : {0.4, 0.6})
        for (double a : {0.3, 0.5, 0.7})
            for (double frac : {0.0, 0.5}) {
                SearchConfig cfg;
                cfg.components = 2;
                cfg.restarts = 20;
                cfg.threads = 1;
                cfg.objective.rho = rho;
                cfg.objective.beta = rho / 2;
                cfg.objective.a = a;
                cfg.objective.penalty = PenaltyKind::phi_squared_with_volume;
                double z0 = density(-phi_inv(a));
                cfg.objective.epsilon = frac * epsilon_cap(rho, rho / 2, a, z0).value;
                auto r = maximize(cfg);
                auto h = IntervalUnion::from(halfspace_with_measure(a, true));
                double gap = std::abs(r.best_value - objective(h, cfg.objective));
                worst_gap = std::max(worst_gap, gap);
                ++total;
                if (r.is_halfspace && gap <= 1e-6) ++ok;
            }
    double t = elapsed(t0);
    return {ok == total && t < 300.0, fmt("%g/%g configs, worst value gap %.3g", ok, total, worst_gap) +
                                          fmt(", %.1fs on one thread", t)};
}

Outcome counterexample() {
    ObjectiveSpec spec;
    spec.rho = 0.1;
    spec.beta = 0.1;
    spec.epsilon = 0.1;
    spec.a = 0.5;
    spec.penalty = PenaltyKind::barycenter_squared;
    double h = objective(IntervalUnion::parse("[0,inf)"), spec);
    double best = -1, best_d = 0;
    for (double d = 2.0; d <= 5.0 + 1e-12; d += 0.01) {
        double t = phi_inv(0.5 - phi_upper(d));
        double v = objective(IntervalUnion({{-kInf, t}, {d, kInf}}), spec) - h;
        if (v > best) {
            best = v;
            best_d = d;
        }
    }
    SearchConfig cfg;
    cfg.objective = spec;
    cfg.components = 2;
    cfg.restarts = 20;
    auto r = maximize(cfg);
    bool escaped = !r.is_halfspace && r.best_value > h;
    return {best > 0 && escaped, fmt("rho 0.1: best gain %.3g at d = %.2f; optimizer gain %.3g", best, best_d,
                                     r.best_value - h) +
                                     ", set " + r.best_set.to_string()};
}

Outcome profiles() {
    int ok = 0, total = 0;
    double worst = 0.0;
    for (auto kind : {ProfileKind::lemma_finallem2, ProfileKind::lemma_finallem3})
        for (auto [a, beta, frac] : {std::tuple{0.3, 0.4, 0.5}, {0.5, 0.5, 1.0}, {0.7, 0.3, 0.25}}) {
            ProfileParams p{a, beta, frac * profile_epsilon_cap(kind, a, beta)};
            auto r = scan_profile(kind, p);
            double d = std::abs(r.argmin - r.alpha);
            worst = std::max(worst, d);
            ++total;
            if (d <= 1e-3 + 1e-12) ++ok;
        }
    return {ok == total, fmt("%g/%g scans, worst |argmin - alpha| %.3g", ok, total, worst)};
}

} // namespace

// --expect-fail N (repeatable) names criteria known to be red; the exit status is then 0 only when
// exactly those fail, so a new failure or an unexpected pass both show up.
int main(int argc, char** argv) {
    std::set<int> expected;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--expect-fail" && i + 1 < argc) expected.insert(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
            return 2;
        }
    }
    report(1, "Mehler identity", mehler_identity);
    report(2, "evaluator agreement", evaluator_agreement);
    report(3, "Borell inequality", borell);
    report(4, "deficit sandwich", sandwich);
    report(5, "Hermite machinery", hermite);
    report(6, "variational identities", variational);
    report(7, "first variation vs finite differences", first_variation);
    report(8, "optimizer recovers half spaces", optimizer_halfspaces);
    report(9, "counterexample reproduction", counterexample);
    report(10, "half-space profile lemmas", profiles);
    std::printf("%zu of 10 criteria failed\n", failed.size());
    if (!expected.empty()) {
        std::printf("expected to fail:");
        for (int e : expected) std::printf(" %d", e);
        std::printf("\n");
        return failed == expected ? 0 : 1;
    }
    return failed.empty() ? 0 : 1;
}
