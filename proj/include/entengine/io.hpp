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

// JSON and CSV serialization: target states, density matrices, filter outcomes,
// Pareto fronts, Bell reports and temperature grids.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "entengine/builder.hpp"
#include "entengine/errors.hpp"
#include "entengine/filtering.hpp"
#include "entengine/optimizer.hpp"
#include "entengine/qcore.hpp"

namespace entengine::io {

using json = nlohmann::json;

/// 12 significant digits.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": malformed JSON (" + std::string(e.what()) + ")");
    }
}

// ---------------------------------------------------------------------------
// Target states: {"n_qubits": N, "terms": [{"bits": "0110", "re": x, "im": y}, ...]}

inline TargetState target_from_json(const json& j) {
    try {
        const int n = j.at("n_qubits").get<int>();
        std::vector<Term> terms;
        for (const auto& t : j.at("terms")) {
            const double re = t.value("re", 0.0);
            const double im = t.value("im", 0.0);
            terms.push_back({bits_from_string(t.at("bits").get<std::string>()), cplx(re, im)});
        }
        return TargetState(n, std::move(terms));
    } catch (const json::exception& e) {
        throw InputError("target: " + std::string(e.what()));
    }
}

inline json target_to_json(const TargetState& t) {
    json terms = json::array();
    for (const auto& term : t.terms()) {
        std::string bits;
        for (int b : term.bits) bits += static_cast<char>('0' + b);
        terms.push_back({{"bits", bits}, {"re", term.amplitude.real()}, {"im", term.amplitude.imag()}});
    }
    return {{"n_qubits", t.n_qubits()}, {"terms", terms}};
}

inline TargetState read_target(const std::string& path) {
    return target_from_json(parse_json(read_file(path), "target '" + path + "'"));
}

// ---------------------------------------------------------------------------
// Matrices: {"dim": d, "entries": [[re, im], ...]} in row-major order.

inline json matrix_to_json(const Matrix& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) entries.push_back({m(i, k).real(), m(i, k).imag()});
    return {{"dim", m.rows()}, {"entries", entries}};
}

inline Matrix matrix_from_json(const json& j) {
    try {
        const auto d = j.at("dim").get<Eigen::Index>();
        const auto& e = j.at("entries");
        if (d < 1 || e.size() != static_cast<std::size_t>(d * d)) throw InputError("matrix: entry count mismatch");
        Matrix m(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index k = 0; k < d; ++k) {
                const auto& z = e.at(static_cast<std::size_t>(i * d + k));
                m(i, k) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
            }
        return m;
    } catch (const json::exception& ex) {
        throw InputError("matrix: " + std::string(ex.what()));
    }
}

inline json density_to_json(const DensityOperator& rho) {
    json j = matrix_to_json(rho.matrix());
    j["site_dims"] = rho.site_dims();
    return j;
}

inline json filter_outcome_to_json(const FilterOutcome& out, double fid) {
    return {{"p_suc", out.p_suc}, {"fidelity", fid}, {"heralded_matrix", matrix_to_json(out.heralded.matrix())}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string front_csv(const ParetoFront& front) {
    bool bell = !front.points.empty();
    for (const auto& p : front.points) bell = bell && p.bell_value.has_value();
    std::string s = "machine,N,l,gamma_h,gamma_c,g,p_suc,fidelity";
    s += bell ? ",bell_value\n" : "\n";
    for (const auto& p : front.points) {
        s += front.family.name() + "," + std::to_string(front.family.n) + "," + std::to_string(front.family.l) + "," +
             fmt(p.gamma_h) + "," + fmt(p.gamma_c) + "," + fmt(p.g) + "," + fmt(p.p_suc) + "," + fmt(p.fidelity);
        if (bell) s += "," + fmt(*p.bell_value);
        s += "\n";
    }
    return s;
}

inline std::string bell_csv(const ParetoFront& front) {
    std::string s = "machine,p_suc,F,bell_name,value,lhv_bound\n";
    for (const auto& p : front.points) {
        if (!p.bell_value) throw InputError("bell_csv: point without a Bell value");
        s += front.family.label() + "," + fmt(p.p_suc) + "," + fmt(p.fidelity) + "," + front.family.bell_name() + "," +
             fmt(*p.bell_value) + "," + fmt(front.family.lhv_bound()) + "\n";
    }
    return s;
}

inline std::string temperature_csv(const TemperatureGrid& grid, Model model) {
    std::string s = "model,t_h,t_c,p_suc,fidelity\n";
    for (std::size_t c = 0; c < grid.t_c.size(); ++c)
        for (std::size_t h = 0; h < grid.t_h.size(); ++h)
            s += to_string(model) + "," + fmt(grid.t_h[h]) + "," + fmt(grid.t_c[c]) + "," + fmt(grid.p_suc[c][h]) +
                 "," + fmt(grid.fidelity[c][h]) + "\n";
    return s;
}

} // namespace entengine::io
