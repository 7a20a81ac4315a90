#include <doctest.h>

#include "gns/cli.hpp"
#include "gns/sets_1d.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gns;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

double field(const std::string& text, const std::string& key) {
    std::istringstream is(text);
    std::string k, v;
    while (is >> k >> v)
        if (k == key) return std::stod(v);
    return std::nan("");
}

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gns_cli_" + name)).string();
}

} // namespace

TEST_CASE("stability command") {
    auto r = run({"stability", "--set", "(-inf,0]", "--rho", "0"});
    CHECK(r.code == exit_ok);
    CHECK(field(r.out, "value") == doctest::Approx(0.25).epsilon(1e-15));
    auto h = run({"stability", "--set", "(-inf,0]", "--rho", "0.5"});
    CHECK(std::abs(field(h.out, "value") - 1.0 / 3.0) < 1e-12);
    auto m = run({"stability", "--set", "(-inf,0]", "--rho", "0.5", "--method", "mehler"});
    CHECK(std::abs(field(m.out, "value") - 1.0 / 3.0) < 1e-8);
    auto mc = run({"stability", "--set", "(-inf,0]", "--rho", "0.5", "--method", "mc", "--pairs", "100000", "--seed", "3"});
    CHECK(mc.code == exit_ok);
    CHECK(std::abs(field(mc.out, "value") - 1.0 / 3.0) < 4 * field(mc.out, "error"));
    CHECK(run({"stability", "--set", "garbage", "--rho", "0.5"}).code == exit_usage);
    CHECK(run({"stability", "--rho", "0.5"}).code == exit_usage);
    CHECK(run({"stability", "--set", "[0,1]", "--rho", "0.97", "--method", "mehler"}).code == exit_convergence);
    CHECK(run({"stability", "--set", "[0,1]", "--rho", "0.5", "--out", "/nonexistent/dir/x.json"}).code == exit_io);
    CHECK(run({"nonsense"}).code == exit_usage);
}

TEST_CASE("stability json report") {
    auto path = tmp("st.json");
    auto r = run({"--timestamp", "T0", "stability", "--set", "[-1,0.5];[1,2]", "--rho", "0.4", "--out", path});
    REQUIRE(r.code == exit_ok);
    auto j = nlohmann::json::parse(slurp(path));
    CHECK(j["manifest"]["command"] == "stability");
    CHECK(j["manifest"]["tool_version"] == kToolVersion);
    CHECK(j["manifest"]["timestamp"] == "T0");
    CHECK(j["cases"].size() == 1);
    CHECK(j["cases"][0]["pass"] == true);
    // serialized set re-parses to the same set
    auto s = IntervalUnion::parse(j["cases"][0]["inputs"]["set"].get<std::string>());
    CHECK(symmetric_difference_measure(s, IntervalUnion::parse("[-1,0.5];[1,2]")) < 1e-12);
    std::remove(path.c_str());
}

TEST_CASE("verify suites") {
    CHECK(run({"verify", "--suite", "borell", "--trials", "10", "--seed", "7"}).code == exit_ok);
    CHECK(run({"verify", "--suite", "sandwich", "--trials", "10"}).code == exit_ok);
    CHECK(run({"verify", "--suite", "variational", "--trials", "10"}).code == exit_ok);
    CHECK(run({"verify", "--suite", "profiles"}).code == exit_ok);
    CHECK(run({"verify", "--suite", "nope"}).code == exit_usage);
    auto path = tmp("ve.json");
    auto r = run({"verify", "--suite", "borell", "--trials", "3", "--rho", "0.3", "--a", "0.4", "--out", path});
    REQUIRE(r.code == exit_ok);
    auto j = nlohmann::json::parse(slurp(path));
    CHECK(j["cases"].size() == 3);
    CHECK(j["manifest"]["seed"] == 7);
    for (auto& c : j["cases"]) {
        CHECK(c["pass"] == true);
        CHECK(c["inputs"]["rho"] == 0.3);
    }
    std::remove(path.c_str());
}

TEST_CASE("optimize command") {
    auto r = run({"optimize", "--rho", "0.5", "--a", "0.5", "--epsilon", "0", "--restarts", "6"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("is_halfspace true") != std::string::npos);
    auto b = run({"optimize", "--rho", "0.1", "--a", "0.5", "--penalty", "barycenter", "--epsilon", "0.1", "--restarts", "6"});
    CHECK(b.code == exit_ok);
    CHECK(b.out.find("is_halfspace false") != std::string::npos);
    auto f = run({"optimize", "--rho", "0.5", "--a", "0.5", "--beta", "0.25", "--epsilon-frac", "0.5", "--restarts", "4"});
    CHECK(f.code == exit_ok);
    CHECK(field(f.out, "epsilon") == doctest::Approx(0.5 * 0.25 / (2 * M_PI) / 5).epsilon(1e-14));
    CHECK(run({"optimize", "--rho", "0.5", "--epsilon", "0.1", "--epsilon-frac", "0.5"}).code == exit_usage);
    CHECK(run({"optimize", "--rho", "1.5"}).code == exit_usage);
}

TEST_CASE("sweep command") {
    auto r = run({"--timestamp", "T1", "sweep", "--what", "stability", "--grid", "0:0.9:0.1", "--a", "0.5"});
    REQUIRE(r.code == exit_ok);
    std::istringstream is(r.out);
    std::string line;
    std::vector<double> vals;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            CHECK(line == "rho,value,error");
            header_seen = true;
            continue;
        }
        vals.push_back(std::stod(line.substr(line.find(',') + 1)));
    }
    REQUIRE(vals.size() == 10);
    CHECK(vals.front() == doctest::Approx(0.25));
    // reproducible byte for byte
    auto again = run({"--timestamp", "T1", "sweep", "--what", "stability", "--grid", "0:0.9:0.1", "--a", "0.5"});
    CHECK(again.out == r.out);

    auto d = run({"sweep", "--what", "deficit", "--grid", "rho=0.3,0.5,0.7", "--set", "(-inf,-0.5];[0.2,1.4]"});
    CHECK(d.code == exit_ok);
    auto sf = run({"sweep", "--what", "stability-form", "--grid", "0.2,0.4", "--set", "(-inf,0];[1,inf)"});
    CHECK(sf.code == exit_ok);
    CHECK(sf.out.find("printed_form") != std::string::npos);
    CHECK(run({"sweep", "--what", "stability", "--grid", ""}).code == exit_usage);
    CHECK(run({"sweep", "--what", "stability", "--grid", "a:b"}).code == exit_usage);
    CHECK(run({"sweep", "--what", "stability", "--grid", "0.1", "--out", "/nonexistent/dir/x.csv"}).code == exit_io);
}
