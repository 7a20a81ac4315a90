#include "gns/cli.hpp"
#include "gns/errors.hpp"
#include "gns/functionals.hpp"
#include "gns/optimizer.hpp"
#include "gns/ou_operator.hpp"
#include "gns/sampling.hpp"
#include "gns/variational.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace gns {

namespace {

using json = nlohmann::json;

struct Manifest {
    std::string command;
    std::map<std::string, std::string> params;
    uint64_t seed = 0;
    std::string timestamp;

    json to_json() const {
        return json{{"command", command}, {"params", params}, {"seed", seed}, {"tool_version", kToolVersion},
                    {"timestamp", timestamp}};
    }
    std::string csv_header() const {
        std::string h = "# command: " + command + "\n# tool_version: " + kToolVersion + "\n# timestamp: " + timestamp +
                        "\n# seed: " + std::to_string(seed) + "\n";
        for (const auto& [k, v] : params) h += "# param " + k + ": " + v + "\n";
        return h;
    }
};

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + path + " for writing");
    f << body;
    f.flush();
    if (!f) throw IoFailure("write failed: " + path);
}

// "0:0.9:0.1" (inclusive range) or "0.1,0.2,0.5"
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> g;
    std::string s = spec;
    auto eq = s.find('=');
    if (eq != std::string::npos) s = s.substr(eq + 1);
    if (s.empty()) return g;
    if (s.find(':') != std::string::npos) {
        double lo, hi, step;
        char c1, c2;
        std::istringstream is(s);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0))
            throw ParseError("bad grid '" + spec + "'");
        for (long i = 0;; ++i) {
            double v = lo + double(i) * step;
            if (v > hi + 1e-12 * std::max(1.0, std::abs(hi))) break;
            g.push_back(v);
        }
        return g;
    }
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        size_t used = 0;
        double v;
        try {
            v = std::stod(tok, &used);
        } catch (...) {
            throw ParseError("bad grid value '" + tok + "'");
        }
        if (used != tok.size()) throw ParseError("bad grid value '" + tok + "'");
        g.push_back(v);
    }
    return g;
}

struct Case {
    json inputs, outputs;
    bool pass;
};

json case_json(const Case& c) { return json{{"inputs", c.inputs}, {"outputs", c.outputs}, {"pass", c.pass}}; }

std::vector<Case> suite_borell(int trials, uint64_t seed, const std::vector<double>& rhos, const std::vector<double>& as) {
    std::vector<Case> cases;
    CounterRng rng(derive_seed(seed, 1));
    int i = 0;
    for (double rho : rhos)
        for (double a : as) {
            double nh = halfspace_stability(a, rho);
            for (int t = 0; t < trials; ++t, ++i) {
                auto s = random_set_with_measure(rng, a, 4, -4.0, 4.0);
                auto ns = noise_stability(s, rho);
                double tol = std::max(1e-8, 10.0 * ns.error);
                cases.push_back({json{{"set", s.to_string()}, {"rho", rho}, {"a", a}},
                                 json{{"stability", ns.value}, {"halfspace", nh}, {"deficit", nh - ns.value}},
                                 ns.value <= nh + tol});
            }
        }
    return cases;
}

std::vector<Case> suite_sandwich(int trials, uint64_t seed, const std::vector<double>& rhos, double a) {
    std::vector<Case> cases;
    CounterRng rng(derive_seed(seed, 2));
    for (double rho : rhos) {
        int got = 0;
        for (int draw = 0; got < trials && draw < 1000 * trials; ++draw) {
            auto s = random_set_with_measure(rng, a, 4, -4.0, 4.0);
            double z = barycenter(s);
            if (std::abs(z) < 0.05) continue;
            ++got;
            auto r = deficit_report(s, rho, rho, a, std::abs(z));
            json out;
            to_json(out, r);
            bool pass = r.upper_ok && r.lower_ok && r.lower_ok_special.value_or(true);
            cases.push_back({json{{"set", s.to_string()}, {"rho", rho}, {"beta", rho}, {"a", a}}, out, pass});
        }
    }
    return cases;
}

std::vector<Case> suite_variational(int trials, uint64_t seed, const std::vector<double>& rhos) {
    std::vector<Case> cases;
    CounterRng rng(derive_seed(seed, 3));
    for (double rho : rhos)
        for (int t = 0; t < trials; ++t) {
            auto s = random_interval_union(rng, 4, -4.0, 4.0);
            auto bd = boundary(s);
            std::vector<double> n;
            for (auto& b : bd) n.push_back(b.normal);
            double div = 0.0;
            for (int k = 0; k < 20; ++k) {
                double x = rng.uniform(-4.0, 4.0);
                div = std::max(div, std::abs(rho * s_operator(s, rho, n, x) + ou_indicator(s, rho, x).derivative));
            }
            auto sf = stability_form(s, rho);
            // G-form on random f
            double gmin = 0.0;
            for (int k = 0; k < 5 && bd.size() >= 2; ++k) {
                std::vector<double> f(bd.size());
                for (auto& v : f) v = rng.uniform(-1.0, 1.0);
                double q = 0.0;
                for (size_t i = 0; i < bd.size(); ++i)
                    for (size_t j = 0; j < bd.size(); ++j)
                        q += f[i] * f[j] * std::exp(-(bd[i].location * bd[i].location + bd[j].location * bd[j].location -
                                                      2 * rho * bd[i].location * bd[j].location) /
                                                    (2 * (1 - rho * rho)));
                gmin = std::min(gmin, q);
            }
            bool half = bd.size() == 1;
            bool pass = div <= 1e-10 && sf.value >= -1e-10 && (half ? std::abs(sf.value) <= 1e-10 : (sf.sign_condition ? sf.closed_form : sf.value) > 0.0 || bd.empty()) &&
                        gmin >= -1e-12 && sf.value >= sf.lemma_bound - 1e-12;
            cases.push_back({json{{"set", s.to_string()}, {"rho", rho}},
                             json{{"divergence_residual", div}, {"stability_form", sf.value},
                                  {"closed_form", sf.closed_form}, {"sign_condition", sf.sign_condition},
                                  {"lemma_bound", sf.lemma_bound}, {"g_form_min", gmin}},
                             pass});
        }
    return cases;
}

std::vector<Case> suite_profiles() {
    std::vector<Case> cases;
    struct T {
        double a, beta, frac;
    };
    for (auto kind : {ProfileKind::lemma_finallem2, ProfileKind::lemma_finallem3})
        for (T t : {T{0.3, 0.4, 0.5}, T{0.5, 0.5, 1.0}, T{0.7, 0.3, 0.25}}) {
            ProfileParams p{t.a, t.beta, t.frac * profile_epsilon_cap(kind, t.a, t.beta)};
            auto sc = scan_profile(kind, p);
            cases.push_back({json{{"kind", kind == ProfileKind::lemma_finallem2 ? "finallem2" : "finallem3"},
                                  {"a", p.a}, {"beta", p.beta}, {"epsilon", p.epsilon}},
                             json{{"argmin", sc.argmin}, {"alpha", sc.alpha}, {"min", sc.min_value}},
                             std::abs(sc.argmin - sc.alpha) <= 1e-3});
        }
    return cases;
}

} // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian noise stability laboratory"};
    app.require_subcommand(1);
    std::string timestamp;
    app.add_option("--timestamp", timestamp, "fixed manifest timestamp (default: now)");

    // stability
    auto* st = app.add_subcommand("stability", "noise stability of a set");
    std::string st_set, st_method = "quadrature", st_out;
    double st_rho = 0.0;
    long st_pairs = 10'000'000;
    uint64_t st_seed = 1;
    int st_terms = 0;
    st->add_option("--set", st_set, "interval union, e.g. \"(-inf,0];[1.25,2.5]\"")->required();
    st->add_option("--rho", st_rho)->required();
    st->add_option("--method", st_method)->check(CLI::IsMember({"quadrature", "mehler", "mc"}));
    st->add_option("--pairs", st_pairs);
    st->add_option("--terms", st_terms);
    st->add_option("--seed", st_seed);
    st->add_option("--out", st_out);

    // verify
    auto* ve = app.add_subcommand("verify", "run a property suite");
    std::string ve_suite, ve_out;
    int ve_trials = 100;
    uint64_t ve_seed = 7;
    std::vector<double> ve_rho, ve_a;
    ve->add_option("--suite", ve_suite)->required()->check(CLI::IsMember({"borell", "sandwich", "variational", "profiles"}));
    ve->add_option("--trials", ve_trials)->check(CLI::PositiveNumber);
    ve->add_option("--seed", ve_seed);
    ve->add_option("--rho", ve_rho);
    ve->add_option("--a", ve_a);
    ve->add_option("--out", ve_out);

    // optimize
    auto* op = app.add_subcommand("optimize", "maximize a penalized objective");
    double op_rho = 0.5, op_beta = -1.0, op_a = 0.5, op_eps = 0.0, op_frac = -1.0;
    std::string op_penalty = "phi_volume", op_out;
    int op_m = 2, op_restarts = 20, op_iters = 4000, op_threads = 0;
    uint64_t op_seed = 1;
    op->add_option("--rho", op_rho);
    op->add_option("--beta", op_beta);
    op->add_option("--a", op_a);
    auto* eps_opt = op->add_option("--epsilon", op_eps);
    op->add_option("--epsilon-frac", op_frac)->excludes(eps_opt);
    op->add_option("--penalty", op_penalty)
        ->check(CLI::IsMember({"phi", "phi_squared", "phi_volume", "phi_squared_with_volume", "2z", "barycenter",
                               "barycenter_squared", "none"}));
    op->add_option("--components", op_m);
    op->add_option("--restarts", op_restarts);
    op->add_option("--max-iters", op_iters);
    op->add_option("--threads", op_threads);
    op->add_option("--seed", op_seed);
    op->add_option("--out", op_out);

    // sweep
    auto* sw = app.add_subcommand("sweep", "grid evaluation to CSV");
    std::string sw_what, sw_grid, sw_set, sw_out;
    double sw_a = 0.5, sw_beta = -1.0;
    sw->add_option("--what", sw_what)->required()->check(CLI::IsMember({"deficit", "stability", "stability-form"}));
    sw->add_option("--grid", sw_grid, "rho grid: lo:hi:step or a comma list")->required();
    sw->add_option("--set", sw_set);
    sw->add_option("--a", sw_a);
    sw->add_option("--beta", sw_beta);
    sw->add_option("--out", sw_out);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    Manifest man;
    man.timestamp = timestamp.empty() ? now_utc() : timestamp;
    try {
        if (*st) {
            auto s = IntervalUnion::parse(st_set);
            StabilityOptions o;
            o.mc_pairs = st_pairs;
            o.seed = st_seed;
            o.mehler_terms = st_terms;
            auto method = stability_method_from_string(st_method);
            auto r = noise_stability(s, st_rho, method, o);
            man.command = "stability";
            man.seed = method == StabilityMethod::monte_carlo ? st_seed : 0;
            man.params = {{"set", s.to_string()}, {"rho", format_real(st_rho)}, {"method", to_string(method)}};
            out << "value " << format_real(r.value) << "\nerror " << format_real(r.error) << "\nmethod "
                << to_string(method) << "\n";
            if (!st_out.empty()) {
                json j{{"manifest", man.to_json()},
                       {"cases", json::array({json{{"inputs", {{"set", s.to_string()}, {"rho", st_rho}}},
                                                   {"outputs", {{"value", r.value}, {"error", r.error},
                                                                {"method", to_string(method)}, {"samples", r.samples},
                                                                {"terms", r.terms}}},
                                                   {"pass", true}}})}};
                write_file(st_out, j.dump(2) + "\n");
            }
            return exit_ok;
        }
        if (*ve) {
            man.command = "verify";
            man.seed = ve_seed;
            man.params = {{"suite", ve_suite}, {"trials", std::to_string(ve_trials)}};
            std::vector<Case> cases;
            if (ve_suite == "borell") {
                auto rhos = ve_rho.empty() ? std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9} : ve_rho;
                auto as = ve_a.empty() ? std::vector<double>{0.2, 0.5, 0.8} : ve_a;
                cases = suite_borell(ve_trials, ve_seed, rhos, as);
            } else if (ve_suite == "sandwich") {
                auto rhos = ve_rho.empty() ? std::vector<double>{0.3, 0.5, 0.7} : ve_rho;
                cases = suite_sandwich(ve_trials, ve_seed, rhos, ve_a.empty() ? 0.5 : ve_a[0]);
            } else if (ve_suite == "variational") {
                auto rhos = ve_rho.empty() ? std::vector<double>{0.5} : ve_rho;
                cases = suite_variational(ve_trials, ve_seed, rhos);
            } else {
                cases = suite_profiles();
            }
            int failed = 0;
            json arr = json::array();
            for (const auto& c : cases) {
                failed += !c.pass;
                arr.push_back(case_json(c));
            }
            out << "suite " << ve_suite << ": " << cases.size() - failed << "/" << cases.size() << " passed\n";
            if (!ve_out.empty()) write_file(ve_out, json{{"manifest", man.to_json()}, {"cases", arr}}.dump(2) + "\n");
            return failed ? exit_property : exit_ok;
        }
        if (*op) {
            SearchConfig cfg;
            cfg.components = op_m;
            cfg.restarts = op_restarts;
            cfg.max_iters = op_iters;
            cfg.seed = op_seed;
            cfg.threads = op_threads;
            cfg.objective.rho = op_rho;
            cfg.objective.beta = op_beta > 0.0 ? op_beta : op_rho / 2.0;
            cfg.objective.a = op_a;
            cfg.objective.penalty = penalty_kind_from_string(op_penalty);
            cfg.objective.epsilon = op_eps;
            if (op_frac >= 0.0) {
                double z0 = density(-phi_inv(op_a));
                cfg.objective.epsilon = op_frac * epsilon_cap(op_rho, cfg.objective.beta, op_a, z0).value;
            }
            auto r = maximize(cfg);
            man.command = "optimize";
            man.seed = op_seed;
            man.params = {{"rho", format_real(op_rho)}, {"beta", format_real(cfg.objective.beta)},
                          {"a", format_real(op_a)}, {"epsilon", format_real(cfg.objective.epsilon)},
                          {"penalty", to_string(cfg.objective.penalty)}, {"components", std::to_string(op_m)},
                          {"restarts", std::to_string(op_restarts)}};
            out << "best_set " << r.best_set.to_string() << "\nbest_value " << format_real(r.best_value)
                << "\nepsilon " << format_real(cfg.objective.epsilon) << "\nis_halfspace "
                << (r.is_halfspace ? "true" : "false") << "\n";
            if (!op_out.empty()) {
                json res;
                to_json(res, r);
                json in{{"rho", op_rho}, {"beta", cfg.objective.beta}, {"a", op_a}, {"epsilon", cfg.objective.epsilon},
                        {"penalty", to_string(cfg.objective.penalty)}};
                write_file(op_out, json{{"manifest", man.to_json()},
                                        {"cases", json::array({json{{"inputs", in}, {"outputs", res}, {"pass", true}}})}}
                                       .dump(2) +
                                       "\n");
            }
            return exit_ok;
        }
        if (*sw) {
            auto grid = parse_grid(sw_grid);
            if (grid.empty()) {
                err << "usage error: empty grid\n";
                return exit_usage;
            }
            man.command = "sweep";
            man.params = {{"what", sw_what}, {"grid", sw_grid}};
            IntervalUnion s = sw_set.empty() ? IntervalUnion::from(halfspace_with_measure(sw_a, true))
                                             : IntervalUnion::parse(sw_set);
            man.params["set"] = s.to_string();
            std::ostringstream csv;
            csv << man.csv_header();
            if (sw_what == "stability") {
                csv << "# columns: rho, noise stability (quadrature), error estimate\nrho,value,error\n";
                for (double rho : grid) {
                    auto r = noise_stability(s, rho);
                    csv << format_real(rho) << "," << format_real(r.value) << "," << format_real(r.error) << "\n";
                }
            } else if (sw_what == "deficit") {
                double a = measure(s);
                double z = std::abs(barycenter(s));
                csv << "# columns: deficit report per rho with beta = min(beta, rho), z0 = |z|, a = measure(set)\n"
                    << "rho," << deficit_csv_header() << "\n";
                for (double rho : grid) {
                    double beta = sw_beta > 0.0 ? std::min(sw_beta, rho) : rho;
                    auto r = deficit_report(s, rho, beta, a, z);
                    csv << format_real(rho) << "," << to_csv_row(r) << "\n";
                }
            } else {
                csv << "# columns: rho, direct boundary sum, exact closed form under the sign condition, calibrated "
                       "product form, printed product form, sign condition, perimeter gap, lemma lower bound\n"
                    << "rho,value,closed_form,product_form,printed_form,sign_condition,perimeter_gap,lemma_bound\n";
                for (double rho : grid) {
                    auto f = stability_form(s, rho);
                    csv << format_real(rho) << "," << format_real(f.value) << "," << format_real(f.closed_form) << ","
                        << format_real(f.product_form) << "," << format_real(f.printed_form) << ","
                        << (f.sign_condition ? 1 : 0) << "," << format_real(f.perimeter_gap) << ","
                        << format_real(f.lemma_bound) << "\n";
                }
            }
            if (sw_out.empty()) out << csv.str();
            else write_file(sw_out, csv.str());
            return exit_ok;
        }
    } catch (const ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << " (best estimate " << format_real(e.best_estimate) << ")\n";
        return exit_convergence;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return exit_infeasible;
    } catch (const IoFailure& e) {
        err << "i/o failure: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace gns
