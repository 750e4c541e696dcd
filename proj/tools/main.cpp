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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "entengine/cli.hpp"

namespace cli = entengine::cli;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string model;
    std::string machine;
    int threads = -1;
    bool print_config = false;
};

void add_common(CLI::App* sub, Common& c, bool with_machine) {
    sub->add_option("--config", c.config, "JSON run configuration");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--model", c.model, "dissipation model")->check(CLI::IsMember({"reset", "lindblad"}));
    sub->add_option("--threads", c.threads, "sweep worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--print-config", c.print_config, "print the resolved configuration and exit");
    if (with_machine) sub->add_option("machine", c.machine, "machine family: ghz:N, dicke:N:L or cluster");
}

cli::RunConfig resolve(const Common& c) {
    nlohmann::json patch = nlohmann::json::object();
    if (!c.config.empty()) patch = entengine::io::parse_json(entengine::io::read_file(c.config), "config '" + c.config + "'");
    auto cfg = cli::RunConfig::from_json(patch);
    nlohmann::json overrides = nlohmann::json::object();
    if (!c.out.empty()) overrides["out"] = c.out;
    if (!c.model.empty()) overrides["model"] = c.model;
    if (!c.machine.empty()) overrides["machine"] = c.machine;
    if (c.threads >= 0) overrides["threads"] = c.threads;
    cli::detail::merge_into(cfg.raw, overrides, "");
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Autonomous multipartite entanglement engine simulator"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1);

    std::string target_file;
    auto* feas = app.add_subcommand("feasibility", "check whether a target state admits a machine");
    feas->add_option("target", target_file, "target-state JSON file")->required();

    Common common;
    auto* steady = app.add_subcommand("steady", "steady state, heralded state, p_suc and fidelity");
    auto* pareto = app.add_subcommand("pareto", "fidelity / success-probability Pareto front");
    auto* tempsweep = app.add_subcommand("tempsweep", "fidelity over a (T_h, T_c) grid");
    auto* bell = app.add_subcommand("bell", "Bell values along the Pareto front");
    for (auto* sub : {steady, pareto, tempsweep, bell}) add_common(sub, common, true);

    int n = 0;
    auto* maxpsuc = app.add_subcommand("maxpsuc", "analytic maximum p_suc of the N-qubit GHZ machine");
    maxpsuc->add_option("N", n, "number of qubits")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kInputError;
    }

    return cli::guarded(
        [&]() -> int {
            if (feas->parsed()) return cli::cmd_feasibility(target_file, std::cout);
            if (maxpsuc->parsed()) return cli::cmd_maxpsuc(n, std::cout);
            const auto cfg = resolve(common);
            if (common.print_config) {
                std::cout << cfg.raw.dump(2) << "\n";
                return cli::kOk;
            }
            if (steady->parsed()) return cli::cmd_steady(cfg, std::cout);
            if (pareto->parsed()) return cli::cmd_pareto(cfg, std::cout);
            if (tempsweep->parsed()) return cli::cmd_tempsweep(cfg, std::cout);
            return cli::cmd_bell(cfg, std::cout);
        },
        std::cerr);
}
