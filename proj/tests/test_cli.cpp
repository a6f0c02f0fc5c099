#include "doctest.h"

#include "coevent/cli.hpp"
#include "coevent/systems.hpp"

#include "helpers.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coevent;
using nlohmann::json;

namespace {

std::string data(const std::string& name) {
    const char* dir = std::getenv("COEVENT_DATA_DIR");
    return std::string(dir ? dir : "data") + "/" + name;
}

struct Result {
    int code;
    std::string out, err;
};

Result invoke(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = cli::run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path.string();
}

} // namespace

TEST_CASE("run on the walker matches the classical scheme stage by stage") {
    const auto basic = invoke({"run", "--system", data("walker.json"), "--scheme", "basic", "--stages", "3"});
    const auto classical = invoke({"run", "--system", data("walker.json"), "--scheme", "classical", "--stages", "3"});
    REQUIRE(basic.code == cli::kOk);
    REQUIRE(classical.code == cli::kOk);
    const auto a = lines(basic.out), b = lines(classical.out);
    REQUIRE(a.size() == 4);
    for (std::size_t t = 0; t < 4; ++t) {
        CHECK(a[t]["t"] == t);
        CHECK(a[t]["count"] == b[t]["count"]);
        CHECK(a[t]["coevents"] == b[t]["coevents"]);
    }
    CHECK(a[1]["count"] == 6);
}

TEST_CASE("run on the two-site hopper") {
    const auto basic = invoke({"run", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2"});
    REQUIRE(basic.code == cli::kOk);
    const auto b = lines(basic.out);
    REQUIRE(b.size() == 3);
    CHECK(b[0]["count"] == 1);
    CHECK(b[1]["count"] == 2);
    // (0→1)* and (0→0)* each have a singleton branch and eight co-events on a three-history support
    CHECK(b[2]["count"] == 18);
    CHECK(b[0]["coevents"][0]["text"] == "0*");
    CHECK(b[0]["coevents"][0]["monomials"] == json::parse(R"([["0"]])"));
    CHECK(b[0]["coevents"][0]["support"] == json::parse(R"(["0"])"));
    CHECK(b[1]["coevents"][0]["lineage"] == json::parse("[0]"));

    const auto global = invoke({"run", "--system", data("hopper2.json"), "--scheme", "global", "--stages", "2"});
    REQUIRE(global.code == cli::kOk);
    const auto g = lines(global.out);
    CHECK(g[2]["count"] == 2);
    CHECK(g[2]["dead_ends"] == json::array());
    CHECK(g[2]["coevents"][0]["text"] == "0→0→0*");
}

TEST_CASE("run writes to a file with --out") {
    const auto path = (std::filesystem::temp_directory_path() / "coevent_run_out.jsonl").string();
    const auto r = invoke({"run", "--system", data("hopper2.json"), "--scheme", "maxaff", "--stages", "2", "--out", path});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto l = lines(buf.str());
    REQUIRE(l.size() == 3);
    CHECK(l[2]["count"] == 4);
}

TEST_CASE("missing spec file is a validation failure naming the file") {
    const auto r = invoke({"run", "--system", "/nonexistent/spec.json", "--scheme", "basic"});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("/nonexistent/spec.json") != std::string::npos);
}

TEST_CASE("bad arguments are validation failures") {
    CHECK(invoke({}).code == cli::kValidationError);
    CHECK(invoke({"run", "--system", data("walker.json")}).code == cli::kValidationError);
    CHECK(invoke({"run", "--system", data("walker.json"), "--scheme", "nonsense"}).code == cli::kValidationError);
    CHECK(invoke({"walk", "--system", data("walker.json"), "--scheme", "basic", "--policy", "coin"}).code ==
          cli::kValidationError);
}

TEST_CASE("budget overruns exit with code 2") {
    const auto r = invoke({"run", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "3", "--no-check"});
    CHECK(r.code == cli::kBudgetError);
    CHECK(r.err.find("budget") != std::string::npos);
    CHECK(invoke({"run", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2", "--max-histories", "4"})
              .code == cli::kBudgetError);
}

TEST_CASE("history cap precedence: flag over environment over spec file") {
    setenv("COEVENT_MAX_HISTORIES", "4", 1);
    CHECK(invoke({"run", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2"}).code ==
          cli::kBudgetError);
    CHECK(invoke({"run", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2", "--max-histories", "8"})
              .code == cli::kOk);
    // the walker file carries 243; the environment still wins over it
    CHECK(invoke({"run", "--system", data("walker.json"), "--scheme", "basic", "--stages", "2"}).code ==
          cli::kBudgetError);
    setenv("COEVENT_MAX_HISTORIES", "many", 1);
    CHECK(invoke({"run", "--system", data("walker.json"), "--scheme", "basic", "--stages", "1"}).code ==
          cli::kValidationError);
    unsetenv("COEVENT_MAX_HISTORIES");
    CHECK(invoke({"run", "--system", data("walker.json"), "--scheme", "basic", "--stages", "4", "--no-check"}).code ==
          cli::kOk);
}

TEST_CASE("verify passes on the shipped presets") {
    const auto w = invoke({"verify", "--system", data("walker.json"), "--stages", "3"});
    CHECK(w.code == cli::kOk);
    CHECK(w.out.find("basic.classical_reduction") != std::string::npos);
    const auto h = invoke({"verify", "--system", data("hopper2.json"), "--stages", "2", "--oracle"});
    CHECK(h.code == cli::kOk);
    CHECK(h.out.find("oracle_equivalence") != std::string::npos);
    const auto h3 = invoke({"verify", "--system", data("hopper3.json"), "--stages", "1", "--json"});
    CHECK(h3.code == cli::kOk);
    CHECK(json::parse(h3.out)["ok"] == true);
}

TEST_CASE("verify names the consistency check on a perturbed matrix") {
    SystemSpec spec = parse_system_spec(dump_custom_spec(testutil::hadamard_hopper(2)));
    auto j = json::parse(dump_custom_spec(testutil::hadamard_hopper(2)));
    auto& d = j["stages"][2]["decoherence"];
    for (auto& row : d)
        for (auto& c : row) c[0] = c[0].get<double>() * 0.99;
    d[4][4][0] = d[4][4][0].get<double>() + 0.01;
    const auto path = temp_file("coevent_perturbed.json", j.dump());
    const auto r = invoke({"verify", "--system", path, "--stages", "2"});
    CHECK(r.code == cli::kValidationError);
    CHECK(r.err.find("consistency") != std::string::npos);
}

TEST_CASE("seeded random walks are identical") {
    const std::vector<std::string> args = {"walk",   "--system", data("hopper2.json"), "--scheme", "basic",
                                           "--stages", "2",      "--policy", "random", "--seed", "7", "--json"};
    const auto a = invoke(args), b = invoke(args);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    const auto j = json::parse(a.out);
    CHECK(j["steps"].size() == 3);
    CHECK(j["choices"].size() == 3);
    CHECK(j["seed"] == 7);
}

TEST_CASE("interactive walk reads choices from standard input") {
    const auto r = invoke({"walk", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2", "--policy",
                        "interactive"},
                       "0\n0\n0\n");
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("final: 0→0→0*") != std::string::npos);
    const auto short_input = invoke({"walk", "--system", data("hopper2.json"), "--scheme", "basic", "--stages", "2",
                                  "--policy", "interactive"},
                                 "0\n");
    CHECK(short_input.code == cli::kValidationError);
}

TEST_CASE("walker walks list only classical candidates") {
    const auto r = invoke({"walk", "--system", data("walker.json"), "--scheme", "basic", "--stages", "3", "--policy",
                        "random", "--seed", "3", "--json"});
    REQUIRE(r.code == cli::kOk);
    for (const auto& step : json::parse(r.out)["steps"])
        for (const auto& c : step["candidates"]) {
            REQUIRE(c["monomials"].size() == 1);
            REQUIRE(c["monomials"][0].size() == 1);
        }
}

TEST_CASE("global walk into a dead end exits with code 3") {
    const std::string spec = R"({"kind":"custom","stages":[
        {"labels":["a","b"],"amplitudes":[[1,0],[-2,0]],"classes":["x","x"]},
        {"labels":["a0","a1","b0","b1"],"parents":[0,0,1,1],
         "amplitudes":[[0,0],[1,0],[-1,0],[-1,0]],"classes":["x","x","x","x"]}]})";
    const auto path = temp_file("coevent_dead_end.json", spec);
    const auto r = invoke({"walk", "--system", path, "--scheme", "global", "--stages", "1"});
    CHECK(r.code == cli::kDeadEnd);
    CHECK(r.err.find("stage 1") != std::string::npos);
    const auto run_r = invoke({"run", "--system", path, "--scheme", "global", "--stages", "1"});
    CHECK(run_r.code == cli::kOk);
    CHECK(lines(run_r.out)[1]["dead_ends"] == json::parse("[0]"));
}

TEST_CASE("inspect output rebuilds the same system") {
    const auto first = invoke({"inspect", "--system", data("hopper2.json"), "--stages", "2"});
    REQUIRE(first.code == cli::kOk);
    const auto path = temp_file("coevent_inspect.json", first.out);
    const auto second = invoke({"inspect", "--system", path, "--stages", "2"});
    REQUIRE(second.code == cli::kOk);
    CHECK(first.out == second.out);
    const System a = build_system(parse_system_spec(first.out), 2);
    const System b = testutil::hadamard_hopper(2);
    for (std::size_t t = 0; t < 3; ++t) CHECK(a.matrices[t].entries().cwiseEqual(b.matrices[t].entries()).all());
}
