#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flip/bench.hpp"
#include "flip/io.hpp"

using namespace flip;
namespace fs = std::filesystem;

namespace {

fs::path unique_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("flip_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FLIP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("config field errors carry json-pointer paths") {
    nlohmann::json j{{"family", "state_prep"}};
    CHECK_THROWS_WITH_AS(io::get_u32(j, "/meta/epochs"),
                         "/meta/epochs: missing required field", ConfigError);
    nlohmann::json bad{{"meta", {{"epochs", -3}}}};
    CHECK_THROWS_WITH_AS(io::get_u32(bad, "/meta/epochs"),
                         "/meta/epochs: expected a nonnegative integer", ConfigError);
}

TEST_CASE("graph json round trip") {
    Graph g{5, {{0, 1}, {2, 4}}};
    const auto j = io::graph_to_json(g);
    const Graph back = io::graph_from_json(j);
    CHECK(back.n_nodes == 5);
    CHECK(back.edges == g.edges);
}

TEST_CASE("problem spec json round trip") {
    const ProblemSpec sp = StatePrepSpec{4, 3, 2};
    const auto back = io::spec_from_json(
        Family::StatePrep, io::spec_to_json(Family::StatePrep, sp));
    CHECK(std::get<StatePrepSpec>(back).p == 2);

    MaxCutSpec mc;
    mc.graph = {3, {{0, 2}}};
    mc.d = 4;
    mc.edge_prob = 0.45;
    const auto mc_back = std::get<MaxCutSpec>(
        io::spec_from_json(Family::MaxCut, io::spec_to_json(Family::MaxCut, mc)));
    CHECK(mc_back.graph.edges == mc.graph.edges);
    CHECK(mc_back.d == 4);

    const auto fhm_back = std::get<FhmSpec>(io::spec_from_json(
        Family::Fhm, io::spec_to_json(Family::Fhm, FhmSpec{2, 6.5, 3})));
    CHECK(fhm_back.U == doctest::Approx(6.5));
}

TEST_CASE("trace records round trip through jsonl") {
    const fs::path dir = unique_dir("traces");
    std::vector<TraceRecord> records;
    TraceRecord r;
    r.initializer = "random";
    r.problem_index = 3;
    r.restart = 1;
    r.seed = 99;
    r.family = Family::MaxCut;
    MaxCutSpec spec;
    spec.graph = {3, {{0, 1}, {1, 2}}};
    spec.d = 2;
    r.spec = spec;
    r.l1_norm = 2.0;
    r.trace.c_min = -1.0;
    r.trace.cost_raw = {0.5, -0.25};
    r.trace.cost_norm = {0.25, -0.125};
    r.trace.grad_norm = {1.0, 0.5};
    r.trace.delta_c = {1.25, 0.875};
    records.push_back(r);

    io::write_trace_records(dir / "t.jsonl", records);
    const auto back = io::load_trace_records(dir / "t.jsonl");
    REQUIRE(back.size() == 1);
    CHECK(back[0].initializer == "random");
    CHECK(back[0].trace.cost_norm == r.trace.cost_norm);
    CHECK(back[0].trace.delta_c == r.trace.delta_c);
    CHECK(*back[0].trace.c_min == doctest::Approx(-1.0));
    CHECK(std::get<MaxCutSpec>(back[0].spec).graph.edges == spec.graph.edges);

    SUBCASE("export flattens to one csv row per iteration") {
        io::export_traces_csv(dir / "t.jsonl", dir / "t.csv");
        const auto text = slurp(dir / "t.csv");
        CHECK(text.find("family,initializer,problem_index,restart,seed,iteration,"
                        "cost_raw,cost_norm,delta_c,grad_norm") == 0);
        CHECK(text.find("maxcut,random,3,1,99,0,") != std::string::npos);
        CHECK(text.find("maxcut,random,3,1,99,1,") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("manifest parsing") {
    const fs::path dir = unique_dir("manifest");
    std::ofstream(dir / "ckpt.json") << "{}"; // referenced paths must exist
    nlohmann::json j{
        {"seed", 5},
        {"family", "state_prep"},
        {"steps", 50},
        {"test", {{"n_problems", 4}, {"n", {2, 4}}, {"d", {1, 3}}}},
        {"initializers",
         nlohmann::json::array(
             {{{"name", "random"}, {"alpha", 0.3}, {"restarts", 2}},
              {{"name", "flip"}, {"alpha", 0.1}, {"checkpoint", "ckpt.json"}}})}};
    const auto manifest = io::parse_manifest(j, dir);
    CHECK(manifest.n_problems == 4);
    CHECK(manifest.initializers.size() == 2);
    CHECK(manifest.initializers[0].kind == "random");
    CHECK(manifest.initializers[0].steps == 50);
    CHECK(manifest.initializers[1].checkpoint == dir / "ckpt.json");

    nlohmann::json bad = j;
    bad["initializers"][0].erase("alpha");
    CHECK_THROWS_AS(io::parse_manifest(bad, dir), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("cli exit codes and artifacts") {
    const fs::path dir = unique_dir("cli");

    SUBCASE("missing config exits 2") {
        CHECK(run_cli("train --config " + (dir / "nope.json").string()) == 2);
        CHECK(run_cli("train") == 2);
    }
    SUBCASE("missing input traces exit 3") {
        std::ofstream(dir / "export.json") << R"({
            "input": "missing.jsonl",
            "output": "out.csv"
        })";
        CHECK(run_cli("export --config " + (dir / "export.json").string()) == 3);
    }
    SUBCASE("manifest referencing a missing checkpoint exits 2") {
        std::ofstream(dir / "test.json") << R"({
            "seed": 4,
            "family": "state_prep",
            "test": {"n_problems": 1, "n": [2, 2], "d": [1, 1]},
            "initializers": [{"name": "flip", "alpha": 0.1, "checkpoint": "gone.json"}]
        })";
        CHECK(run_cli("test --config " + (dir / "test.json").string()) == 2);
    }
    SUBCASE("schema violation exits 2") {
        std::ofstream(dir / "bad.json") << R"({"family": "state_prep"})";
        CHECK(run_cli("train --config " + (dir / "bad.json").string()) == 2);
    }
    SUBCASE("train, test, diagnose, patterns, export pipeline") {
        std::ofstream(dir / "train.json") << R"({
            "seed": 3,
            "family": "state_prep",
            "distribution": {"n": [1, 2], "d": [1, 2]},
            "meta": {"epochs": 4, "n_problems": 8, "batch_size": 4,
                     "alpha": 0.004, "inner_steps": 3, "eta": 0.1},
            "checkpoint_every": 2
        })";
        const std::string out1 = (dir / "run1").string();
        const std::string out2 = (dir / "run2").string();
        REQUIRE(run_cli("train --config " + (dir / "train.json").string() +
                        " --out " + out1 + " --quiet") == 0);
        REQUIRE(run_cli("train --config " + (dir / "train.json").string() +
                        " --out " + out2 + " --quiet") == 0);
        CHECK(slurp(dir / "run1/checkpoint.json") == slurp(dir / "run2/checkpoint.json"));
        CHECK(fs::exists(dir / "run1/checkpoint_epoch_2.json"));
        CHECK(fs::exists(dir / "run1/checkpoint_epoch_4.json"));

        std::ofstream(dir / "test.json") << R"({
            "seed": 4,
            "family": "state_prep",
            "steps": 5,
            "test": {"n_problems": 2, "n": [2, 3], "d": [1, 2]},
            "initializers": [
                {"name": "flip", "alpha": 0.1, "checkpoint": "run1/checkpoint.json"},
                {"name": "random", "alpha": 0.3, "restarts": 2}
            ]
        })";
        REQUIRE(run_cli("test --config " + (dir / "test.json").string() + " --out " +
                        (dir / "results").string() + " --quiet") == 0);
        CHECK(fs::exists(dir / "results/traces.jsonl"));
        const auto agg = slurp(dir / "results/aggregate.csv");
        CHECK(agg.find("iteration,mean,median,ci_lo,ci_hi,initializer,family") == 0);
        CHECK(agg.find(",random,state_prep") != std::string::npos);

        std::ofstream(dir / "diag.json") << R"({
            "seed": 1,
            "family": "state_prep",
            "sizes": [[2, 2], [3, 3]],
            "repeats": 12,
            "init": "random"
        })";
        REQUIRE(run_cli("diagnose --config " + (dir / "diag.json").string() +
                        " --out " + (dir / "diag").string() + " --quiet") == 0);
        const auto var_csv = slurp(dir / "diag/variance.csv");
        CHECK(var_csv.find("n,d,variance,R") == 0);
        CHECK(var_csv.find("\n2,2,") != std::string::npos);

        std::ofstream(dir / "export.json") << R"({
            "input": "results/traces.jsonl",
            "output": "results/traces.csv"
        })";
        REQUIRE(run_cli("export --config " + (dir / "export.json").string() +
                        " --quiet") == 0);
        CHECK(fs::exists(dir / "results/traces.csv"));

        // patterns needs a maxcut checkpoint
        std::ofstream(dir / "qtrain.json") << R"({
            "seed": 3,
            "family": "maxcut",
            "distribution": {"n": [3, 4], "d": [1, 2]},
            "meta": {"epochs": 2, "n_problems": 6, "batch_size": 3,
                     "alpha": 0.004, "inner_steps": 2, "eta": 0.1}
        })";
        REQUIRE(run_cli("train --config " + (dir / "qtrain.json").string() +
                        " --out " + (dir / "qrun").string() + " --quiet") == 0);
        std::ofstream(dir / "patterns.json") << R"({
            "checkpoint": "qrun/checkpoint.json",
            "depths": [1, 4]
        })";
        REQUIRE(run_cli("patterns --config " + (dir / "patterns.json").string() +
                        " --out " + (dir / "pat").string() + " --quiet") == 0);
        const auto pat = slurp(dir / "pat/patterns.csv");
        CHECK(pat.find("d,layer,gamma_abs_over_pi,beta_abs_over_pi,ratio") == 0);

        std::ofstream(dir / "baseline.json") << R"({
            "seed": 2,
            "family": "maxcut",
            "distribution": {"n": [3, 4], "d": [2, 2]},
            "m": 3,
            "opt": {"steps": 10, "alpha": 0.02, "optimizer": "adam"}
        })";
        REQUIRE(run_cli("baseline --config " + (dir / "baseline.json").string() +
                        " --out " + (dir / "base").string() + " --quiet") == 0);
        CHECK(fs::exists(dir / "base/heuristics.json"));
    }
    SUBCASE("random-only manifests need no checkpoint") {
        std::ofstream(dir / "rand_only.json") << R"({
            "seed": 8,
            "family": "state_prep",
            "steps": 3,
            "test": {"n_problems": 2, "n": [2, 3], "d": [1, 2]},
            "initializers": [{"name": "random", "alpha": 0.3, "restarts": 2}]
        })";
        REQUIRE(run_cli("test --config " + (dir / "rand_only.json").string() +
                        " --out " + (dir / "rand_only_out").string() +
                        " --quiet") == 0);
        CHECK(fs::exists(dir / "rand_only_out/aggregate.csv"));
    }
    SUBCASE("range violations are caught at parse time with exit 2") {
        std::ofstream(dir / "big.json") << R"({
            "seed": 1,
            "family": "fhm",
            "distribution": {"L": [11, 11], "d": [1, 1]},
            "meta": {"epochs": 1, "n_problems": 1, "batch_size": 1,
                     "alpha": 0.001, "inner_steps": 1, "eta": 0.02}
        })";
        CHECK(run_cli("train --config " + (dir / "big.json").string() + " --out " +
                      (dir / "bigout").string()) == 2);
    }
    fs::remove_all(dir);
}
