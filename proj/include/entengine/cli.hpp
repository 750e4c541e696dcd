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

// Command implementations behind the entengine executable. Each command reads a
// RunConfig, writes its artifacts under the output directory, prints a short
// report and returns a process exit code.

#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "entengine/bell.hpp"
#include "entengine/builder.hpp"
#include "entengine/dynamics.hpp"
#include "entengine/errors.hpp"
#include "entengine/filtering.hpp"
#include "entengine/io.hpp"
#include "entengine/optimizer.hpp"
#include "entengine/qcore.hpp"

namespace entengine::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kInfeasible = 2,
    kCapacity = 3,
    kDegenerate = 4,
    kHeraldFailure = 5,
    kInstability = 6,
};

/// Defaults for every config key. A config file overrides keys it names;
/// unknown keys are rejected.
inline json default_config() {
    return {
        {"machine", "ghz:3"},
        {"target_file", nullptr},
        {"model", "reset"},
        {"couplings", {{"gamma_h", 1e-4}, {"gamma_c", 5e-3}, {"g", 1.6e-3}}},
        {"temperatures", {{"t_h", "inf"}, {"t_c", 0.0}}},
        {"jumps", json::array({json::array({0, 1}), json::array({0, 2})})},
        {"sweep",
         {{"resolution", 25},
          {"refine_iterations", 20},
          {"lambdas", {0.0, 0.25, 1.0, 4.0}},
          {"t_h", {0.5, 1, 2, 5, 10, 20, 50, 100}},
          {"t_c", {0.02, 0.05, 0.1, 0.2, 0.3, 0.5}}}},
        {"tolerances",
         {{"hermiticity", 1e-10},
          {"trace", 1e-10},
          {"psd", -1e-8},
          {"residual", 1e-9},
          {"commutator", 1e-10},
          {"herald_floor", 1e-12},
          {"null_rel", 1e-10},
          {"gap_rel", 1e-13}}},
        {"threads", 0},
        {"out", "."},
    };
}

namespace detail {

inline void merge_into(json& base, const json& patch, const std::string& path) {
    if (!patch.is_object()) throw InputError("config: '" + path + "' must be an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) throw InputError("config: unknown key '" + here + "'");
        auto& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_into(slot, value, here);
        } else {
            slot = value;
        }
    }
}

} // namespace detail

/// Resolved configuration for one invocation.
struct RunConfig {
    json raw = default_config();

    static RunConfig from_json(const json& patch) {
        RunConfig c;
        detail::merge_into(c.raw, patch, "");
        c.validate();
        return c;
    }

    static RunConfig from_file(const std::string& path) {
        return from_json(io::parse_json(io::read_file(path), "config '" + path + "'"));
    }

    void validate() const {
        (void)model();
        (void)temperature("t_h");
        (void)temperature("t_c");
        (void)tolerances();
        if (resolution() < 2) throw InputError("config: sweep.resolution must be at least 2");
        if (refine_iterations() < 0) throw InputError("config: sweep.refine_iterations must be non-negative");
        if (threads() < 0) throw InputError("config: threads must be non-negative");
        for (const char* k : {"gamma_h", "gamma_c", "g"}) {
            const double v = number("couplings", k);
            if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string("config: couplings.") + k + " must be >= 0");
        }
    }

    double number(const std::string& section, const std::string& key) const {
        try {
            return raw.at(section).at(key).get<double>();
        } catch (const json::exception&) {
            throw InputError("config: " + section + "." + key + " must be a number");
        }
    }

    Model model() const {
        if (!raw["model"].is_string()) throw InputError("config: model must be a string");
        return parse_model(raw["model"].get<std::string>());
    }

    static Temperature parse_temperature(const json& v, const std::string& what) {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf" || s == "infinity") return Temperature::infinite();
            if (s == "zero") return Temperature::zero();
            throw InputError("config: " + what + " must be a number, \"inf\" or \"zero\"");
        }
        if (!v.is_number()) throw InputError("config: " + what + " must be a number, \"inf\" or \"zero\"");
        const double t = v.get<double>();
        if (!(t >= 0.0)) throw InputError("config: " + what + " must be non-negative");
        return temperature_from_value(t);
    }

    Temperature temperature(const std::string& key) const {
        return parse_temperature(raw.at("temperatures").at(key), "temperatures." + key);
    }

    std::vector<double> grid(const std::string& key) const {
        std::vector<double> out;
        for (const auto& v : raw.at("sweep").at(key)) {
            const auto t = parse_temperature(v, "sweep." + key);
            out.push_back(t.value());
        }
        if (out.empty()) throw InputError("config: sweep." + key + " is empty");
        return out;
    }

    int resolution() const { return raw.at("sweep").at("resolution").get<int>(); }
    int refine_iterations() const { return raw.at("sweep").at("refine_iterations").get<int>(); }
    std::vector<double> lambdas() const { return raw.at("sweep").at("lambdas").get<std::vector<double>>(); }
    int threads() const { return raw.at("threads").get<int>(); }
    unsigned thread_count() const { return threads() > 0 ? static_cast<unsigned>(threads()) : default_threads(); }
    std::string out_dir() const { return raw.at("out").get<std::string>(); }

    Tolerances tolerances() const {
        const auto& t = raw.at("tolerances");
        try {
            Tolerances tol;
            tol.hermiticity = t.at("hermiticity").get<double>();
            tol.trace = t.at("trace").get<double>();
            tol.psd = t.at("psd").get<double>();
            tol.residual = t.at("residual").get<double>();
            tol.commutator = t.at("commutator").get<double>();
            tol.herald_floor = t.at("herald_floor").get<double>();
            tol.null_rel = t.at("null_rel").get<double>();
            tol.gap_rel = t.at("gap_rel").get<double>();
            return tol;
        } catch (const json::exception& e) {
            throw InputError("config: tolerances: " + std::string(e.what()));
        }
    }

    std::vector<Transition> transitions() const {
        std::vector<Transition> out;
        try {
            for (const auto& pair : raw.at("jumps")) out.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
        } catch (const json::exception& e) {
            throw InputError("config: jumps must be a list of [lower, upper] pairs");
        }
        return out;
    }

    MachineFamily family() const { return MachineFamily::parse(raw.at("machine").get<std::string>()); }

    /// Machine with the configured couplings and temperatures.
    MachineSpec machine() const {
        const auto& tf = raw.at("target_file");
        MachineSpec base = tf.is_null() ? family().machine() : machine_for_target(io::read_target(tf.get<std::string>()));
        if (base.levels().hot_sites().size() != 1) throw InputError("config: machine must have one hot qutrit");
        return base.with_hot_cold(number("couplings", "gamma_h"), number("couplings", "gamma_c"), number("couplings", "g"))
            .with_hot_cold_temperatures(temperature("t_h"), temperature("t_c"));
    }

    Liouvillian liouvillian(const MachineSpec& m) const {
        return model() == Model::Reset ? reset_liouvillian(m) : lindblad_liouvillian(m, JumpConfig::uniform(m, transitions()));
    }

    SweepOptions sweep_options() const {
        SweepOptions o;
        o.resolution = resolution();
        o.refine_iterations = refine_iterations();
        o.lambdas = lambdas();
        o.threads = thread_count();
        return o;
    }
};

/// Provenance block written next to every artifact. The timestamp lives only here.
inline json metadata(const RunConfig& cfg, const std::string& command) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["model"] = to_string(cfg.model());
    std::string jumps;
    for (const auto& t : cfg.transitions()) {
        jumps += (jumps.empty() ? "" : ",") + std::string("(") + std::to_string(t.lower) + "," + std::to_string(t.upper) + ")";
    }
    m["jump_config"] = jumps;
    m["tolerances"] = cfg.raw.at("tolerances");
    m["config"] = cfg.raw;
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    m["timestamp"] = static_cast<long long>(std::time(nullptr));
    return m;
}

namespace detail {

inline std::filesystem::path prepare_out(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir());
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

inline void write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    io::write_file((dir / name).string(), text);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands

/// Feasibility report for a target file: exit 0 when a single-hot witness exists, 2 otherwise.
inline int cmd_feasibility(const std::string& target_file, std::ostream& out) {
    const auto target = io::read_target(target_file);
    json report{{"target", io::target_to_json(target)}};
    const auto w = feasibility_single_hot(target);
    report["feasible"] = w.has_value();
    if (!w) {
        out << report.dump(2) << "\n";
        return kInfeasible;
    }
    report["hot_site"] = w->hot;
    report["levels"] = w->r.r;
    report["delta1"] = w->energies.delta1;
    report["delta2"] = w->energies.delta2;
    const auto mismatch = energy_mismatches(target, w->r, w->energies);
    double worst = 0.0;
    for (std::size_t i = 0; i < mismatch.size(); ++i) {
        worst = std::max(worst, std::abs(target.terms()[i].amplitude) * std::abs(mismatch[i]));
    }
    report["commutator_per_unit_g"] = worst;
    out << report.dump(2) << "\n";
    return kOk;
}

/// Steady state, heralded state, p_suc and fidelity for the configured machine.
inline int cmd_steady(const RunConfig& cfg, std::ostream& out) {
    const auto tol = cfg.tolerances();
    const auto m = cfg.machine();
    const auto ss = steady_state(cfg.liouvillian(m), tol);
    if (ss.residual > tol.residual) {
        throw DegenerateSteadyStateError("steady: residual " + io::fmt(ss.residual) + " exceeds tolerance");
    }
    const auto filtered = apply_filter(ss.rho, m.levels(), tol);
    const double fid = fidelity(filtered.heralded, m.target());
    const auto dir = detail::prepare_out(cfg);
    json steady = io::density_to_json(ss.rho);
    steady["residual"] = ss.residual;
    detail::write_artifact(dir, "steady_state.json", steady.dump(1) + "\n");
    detail::write_artifact(dir, "filter_outcome.json", io::filter_outcome_to_json(filtered, fid).dump(1) + "\n");
    detail::write_artifact(dir, "summary.csv",
                           "model,p_suc,fidelity,residual\n" + to_string(cfg.model()) + "," + io::fmt(filtered.p_suc) +
                               "," + io::fmt(fid) + "," + io::fmt(ss.residual) + "\n");
    detail::write_artifact(dir, "metadata.json", metadata(cfg, "steady").dump(2) + "\n");
    out << "p_suc " << io::fmt(filtered.p_suc) << "\nfidelity " << io::fmt(fid) << "\n";
    return kOk;
}

inline int cmd_pareto(const RunConfig& cfg, std::ostream& out) {
    const auto front = pareto_front(cfg.family(), cfg.sweep_options());
    const auto dir = detail::prepare_out(cfg);
    detail::write_artifact(dir, "front.csv", io::front_csv(front));
    detail::write_artifact(dir, "metadata.json", metadata(cfg, "pareto").dump(2) + "\n");
    out << front.family.label() << ": " << front.points.size() << " front points, max p_suc "
        << io::fmt(front.max_p_suc()) << "\n";
    return kOk;
}

inline int cmd_tempsweep(const RunConfig& cfg, std::ostream& out) {
    const auto m = cfg.machine();
    const auto grid = temperature_sweep(m, cfg.model(), cfg.grid("t_h"), cfg.grid("t_c"),
                                        JumpConfig::uniform(m, cfg.transitions()), cfg.thread_count());
    const auto dir = detail::prepare_out(cfg);
    detail::write_artifact(dir, "tempsweep.csv", io::temperature_csv(grid, cfg.model()));
    detail::write_artifact(dir, "metadata.json", metadata(cfg, "tempsweep").dump(2) + "\n");
    double best = 0.0;
    for (const auto& row : grid.fidelity)
        for (double f : row) best = std::max(best, f);
    out << to_string(cfg.model()) << " temperature grid " << grid.t_c.size() << "x" << grid.t_h.size()
        << ", max fidelity " << io::fmt(best) << "\n";
    return kOk;
}

inline int cmd_bell(const RunConfig& cfg, std::ostream& out) {
    const auto front = bell_sweep(cfg.family(), cfg.sweep_options());
    const auto dir = detail::prepare_out(cfg);
    detail::write_artifact(dir, "bell.csv", io::bell_csv(front));
    detail::write_artifact(dir, "front.csv", io::front_csv(front));
    detail::write_artifact(dir, "metadata.json", metadata(cfg, "bell").dump(2) + "\n");
    std::size_t violating = 0;
    for (const auto& p : front.points) violating += *p.bell_value > front.family.lhv_bound() ? 1 : 0;
    out << front.family.label() << ": " << violating << " of " << front.points.size() << " front points exceed "
        << front.family.bell_name() << " bound " << io::fmt(front.family.lhv_bound()) << "\n";
    return kOk;
}

inline int cmd_maxpsuc(int n, std::ostream& out) {
    out << io::fmt(max_psuc_ghz(n)) << "\n";
    return kOk;
}

/// Runs `body`, mapping library exceptions to exit codes and messages on `err`.
inline int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const CapacityError& e) {
        err << "capacity: " << e.what() << "\n";
        return kCapacity;
    } catch (const DegenerateSteadyStateError& e) {
        err << "degenerate: " << e.what() << "\n";
        return kDegenerate;
    } catch (const HeraldError& e) {
        err << "herald: " << e.what() << "\n";
        return kHeraldFailure;
    } catch (const InstabilityError& e) {
        err << "instability: " << e.what() << "\n";
        return kInstability;
    } catch (const nlohmann::json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    }
}

} // namespace entengine::cli
