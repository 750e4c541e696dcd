// Copyright 2026 The entengine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "entengine/cli.hpp"
#include "entengine/io.hpp"
#include "test_util.hpp"

namespace entengine {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("entengine_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path recipes_dir() {
    const char* env = std::getenv("ENTENGINE_RECIPES");
    return env ? fs::path(env) : fs::path("recipes");
}

TEST(TargetJson, RoundTrip) {
    for (const auto& t : {ghz_target(3), dicke_target(4, 2), cluster_target()}) {
        const auto back = io::target_from_json(io::target_to_json(t));
        EXPECT_EQ(back.n_qubits(), t.n_qubits());
        EXPECT_LE((back.vector() - t.vector()).norm(), 1e-15);
    }
    const auto j = json::parse(R"({"n_qubits": 2, "terms": [{"bits": "01", "re": 0.6}, {"bits": "10", "im": 0.8}]})");
    EXPECT_NEAR(std::abs(io::target_from_json(j).vector()(2) - cplx(0, 0.8)), 0.0, 1e-15);
}

TEST(TargetJson, RejectsMalformedDocuments) {
    for (const char* text : {R"({"terms": []})", R"({"n_qubits": 2, "terms": []})",
                             R"({"n_qubits": 2, "terms": [{"bits": 5}]})",
                             R"({"n_qubits": 2, "terms": [{"bits": "012", "re": 1}]})"}) {
        EXPECT_THROW(io::target_from_json(json::parse(text)), InputError) << text;
    }
    EXPECT_THROW(io::parse_json("{not json", "x"), InputError);
    EXPECT_THROW(io::read_file("/nonexistent/entengine.json"), InputError);
}

TEST(MatrixJson, RoundTripRowMajor) {
    std::mt19937_64 rng(81);
    const Matrix m = testing::random_matrix(rng, 3, 3);
    const json j = io::matrix_to_json(m);
    EXPECT_EQ(j["dim"], 3);
    EXPECT_DOUBLE_EQ(j["entries"][1][0].get<double>(), m(0, 1).real());
    EXPECT_DOUBLE_EQ(j["entries"][3][1].get<double>(), m(1, 0).imag());
    EXPECT_LE(max_abs(io::matrix_from_json(j) - m), 0.0);
    EXPECT_THROW(io::matrix_from_json(json::parse(R"({"dim": 2, "entries": [[1, 0]]})")), InputError);
}

TEST(Csv, FrontSchemaAndFormatting) {
    ParetoFront f{MachineFamily::ghz(3), {{1e-4, 5e-3, 1.6e-3, 0.05, 0.9, std::nullopt}}};
    EXPECT_EQ(io::front_csv(f),
              "machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity\nghz,3,0,0.0001,0.005,0.0016,0.05,0.9\n");
    f.points[0].bell_value = 1.5;
    EXPECT_EQ(io::front_csv(f).substr(0, 60), "machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity,bell_value\nghz,");
    EXPECT_EQ(io::bell_csv(f), "machine,p_suc,F,bell_name,value,lhv_bound\nghz:3,0.05,0.9,mermin,1.5,1\n");
    EXPECT_EQ(io::fmt(1.0 / 3.0), "0.333333333333");
}

TEST(Config, DefaultsAndOverrides) {
    const auto c = cli::RunConfig::from_json(json::parse(R"({"machine": "cluster", "sweep": {"resolution": 7}})"));
    EXPECT_EQ(c.family().label(), "cluster");
    EXPECT_EQ(c.resolution(), 7);
    EXPECT_EQ(c.refine_iterations(), 20);
    EXPECT_EQ(c.temperature("t_h").kind(), Temperature::Kind::Infinite);
    EXPECT_EQ(c.temperature("t_c").kind(), Temperature::Kind::Zero);
    EXPECT_EQ(c.model(), Model::Reset);
    EXPECT_EQ(c.transitions().size(), 2U);
}

TEST(Config, RejectsBadValues) {
    for (const char* text : {R"({"bogus": 1})", R"({"sweep": {"bogus": 1}})", R"({"model": "redfield"})",
                             R"({"temperatures": {"t_h": -1}})", R"({"temperatures": {"t_h": "hot"}})",
                             R"({"sweep": {"resolution": 1}})", R"({"couplings": {"g": -1}})",
                             R"({"couplings": "x"})"}) {
        EXPECT_THROW(cli::RunConfig::from_json(json::parse(text)), InputError) << text;
    }
}

TEST(Config, ShippedRecipesLoad) {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(recipes_dir())) {
        if (entry.path().extension() != ".json") continue;
        const auto cfg = cli::RunConfig::from_file(entry.path().string());
        EXPECT_NO_THROW(cfg.family()) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 8U);
}

TEST(Commands, FeasibilityExitCodes) {
    const auto t = recipes_dir() / "targets";
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_feasibility((t / "ghz3_flipped.json").string(), out), cli::kOk);
    EXPECT_NE(out.str().find("\"feasible\": true"), std::string::npos);
    EXPECT_EQ(cli::cmd_feasibility((t / "ghz3_standard.json").string(), out), cli::kInfeasible);
    for (const char* ok : {"w3.json", "dicke4_2.json", "cluster4.json"}) {
        EXPECT_EQ(cli::cmd_feasibility((t / ok).string(), out), cli::kOk) << ok;
    }
    EXPECT_EQ(cli::guarded([&] { return cli::cmd_feasibility((t / "empty.json").string(), out); }, err),
              cli::kInputError);
}

TEST(Commands, MaxPsucPrintsNinth) {
    std::ostringstream out;
    EXPECT_EQ(cli::cmd_maxpsuc(4, out), 0);
    EXPECT_EQ(out.str(), "0.111111111111\n");
}

TEST(Commands, SteadyIsByteReproducible) {
    const auto a = scratch("steady_a"), b = scratch("steady_b");
    json patch = io::parse_json(io::read_file((recipes_dir() / "fig3_ghz3_steady_point.json").string()), "recipe");
    std::ostringstream out_a, out_b;
    patch["out"] = a.string();
    EXPECT_EQ(cli::cmd_steady(cli::RunConfig::from_json(patch), out_a), 0);
    patch["out"] = b.string();
    EXPECT_EQ(cli::cmd_steady(cli::RunConfig::from_json(patch), out_b), 0);
    EXPECT_EQ(out_a.str(), out_b.str());
    for (const char* file : {"steady_state.json", "filter_outcome.json", "summary.csv"}) {
        EXPECT_EQ(io::read_file((a / file).string()), io::read_file((b / file).string())) << file;
    }
    const auto meta = json::parse(io::read_file((a / "metadata.json").string()));
    EXPECT_EQ(meta["model"], "reset");
    EXPECT_EQ(meta["jump_config"], "(0,1),(0,2)");
    EXPECT_TRUE(meta.contains("tolerances"));
    EXPECT_TRUE(meta.contains("version"));
    const auto outcome = json::parse(io::read_file((a / "filter_outcome.json").string()));
    EXPECT_GT(outcome["p_suc"].get<double>(), 0.0);
    EXPECT_LT(outcome["p_suc"].get<double>(), 1.0);
    EXPECT_EQ(outcome["heralded_matrix"]["dim"], 8);
}

TEST(Commands, ErrorsMapToExitCodes) {
    std::ostringstream out, err;
    const auto dir = scratch("errors");
    auto run = [&](const char* text) {
        json patch = json::parse(text);
        patch["out"] = dir.string();
        return cli::guarded([&] { return cli::cmd_steady(cli::RunConfig::from_json(patch), out); }, err);
    };
    EXPECT_EQ(run(R"({"machine": "ghz:6"})"), cli::kCapacity);
    EXPECT_EQ(run(R"({"machine": "ghz:x"})"), cli::kInputError);
    EXPECT_EQ(run(R"({"couplings": {"g": 0}})"), cli::kHeraldFailure);
    EXPECT_EQ(run(R"({"model": "lindblad", "jumps": [[0, 2], [1, 2]], "temperatures": {"t_h": "zero"},
                      "couplings": {"g": 0}})"),
              cli::kDegenerate);
    const auto t = recipes_dir() / "targets" / "ghz3_standard.json";
    json patch = json::parse("{}");
    patch["target_file"] = t.string();
    patch["out"] = dir.string();
    EXPECT_EQ(cli::guarded([&] { return cli::cmd_steady(cli::RunConfig::from_json(patch), out); }, err),
              cli::kInfeasible);
}

TEST(Commands, UncoupledSteadyMatchesProductPrediction) {
    const auto dir = scratch("uncoupled");
    json patch = json::parse(R"({"couplings": {"g": 0}, "temperatures": {"t_h": 3.0, "t_c": 0.4}})");
    patch["out"] = dir.string();
    std::ostringstream out;
    ASSERT_EQ(cli::cmd_steady(cli::RunConfig::from_json(patch), out), 0);
    const auto outcome = json::parse(io::read_file((dir / "filter_outcome.json").string()));
    // Heralded product state: weight on |100> and |011> from the filtered thermal blocks.
    const auto m = ghz_machine(3);
    const auto hot = thermal_populations(1.0, 2.5, Temperature::finite(3.0));
    const auto cold = thermal_populations(m.energies().delta1[1], m.energies().delta2[1], Temperature::finite(0.4));
    const double h1 = hot(1) / (hot(0) + hot(1)), h0 = hot(0) / (hot(0) + hot(1));
    const double c1 = cold(1) / (cold(1) + cold(2)), c2 = cold(2) / (cold(1) + cold(2));
    EXPECT_NEAR(outcome["fidelity"].get<double>(), 0.5 * (h1 * c1 * c1 + h0 * c2 * c2), 1e-12);
}

TEST(Commands, ParetoAndBellWriteCsv) {
    const auto dir = scratch("pareto");
    json patch = json::parse(R"({"machine": "ghz:3", "sweep": {"resolution": 5, "refine_iterations": 2}, "threads": 1})");
    patch["out"] = dir.string();
    std::ostringstream out;
    ASSERT_EQ(cli::cmd_pareto(cli::RunConfig::from_json(patch), out), 0);
    const auto csv = io::read_file((dir / "front.csv").string());
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity");
    EXPECT_GE(std::count(csv.begin(), csv.end(), '\n'), 2);

    patch["machine"] = "cluster";
    ASSERT_EQ(cli::cmd_bell(cli::RunConfig::from_json(patch), out), 0);
    const auto bell = io::read_file((dir / "bell.csv").string());
    std::istringstream lines(bell);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "machine,p_suc,F,bell_name,value,lhv_bound");
    while (std::getline(lines, line)) EXPECT_EQ(line.substr(line.rfind(',') + 1), "2");
}

TEST(Commands, TempsweepWritesGrid) {
    const auto dir = scratch("tempsweep");
    json patch = json::parse(R"({"model": "lindblad", "sweep": {"t_h": [1, "inf"], "t_c": [0.1]}, "threads": 1})");
    patch["out"] = dir.string();
    std::ostringstream out;
    ASSERT_EQ(cli::cmd_tempsweep(cli::RunConfig::from_json(patch), out), 0);
    const auto csv = io::read_file((dir / "tempsweep.csv").string());
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("lindblad,inf,0.1,"), std::string::npos);
}

} // namespace
} // namespace entengine
