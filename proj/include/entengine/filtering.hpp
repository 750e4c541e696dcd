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

// Local heralding filter Pi = (x)_k (1 - |R_k><R_k|), fidelity against the
// target, and the analytic maximum success probability of the GHZ machine.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "entengine/builder.hpp"
#include "entengine/dynamics.hpp"
#include "entengine/qcore.hpp"

namespace entengine {

struct FilterOutcome {
    DensityOperator heralded;  ///< on 2^N, in the target's computational basis
    double p_suc = 0.0;
    double raw_projected_trace = 0.0;
};

/// Qutrit index of each of the 2^N filtered basis states, in qubit order.
inline std::vector<std::size_t> filtered_indices(const LevelAssignment& r) {
    const std::size_t n = r.size();
    std::vector<std::size_t> out(std::size_t{1} << n);
    for (std::size_t q = 0; q < out.size(); ++q) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const int bit = static_cast<int>((q >> (n - 1 - k)) & 1U);
            idx = idx * 3 + static_cast<std::size_t>(r.level(k, bit));
        }
        out[q] = idx;
    }
    return out;
}

inline Matrix filter_projector(const LevelAssignment& r) {
    const auto dim = static_cast<Eigen::Index>(qutrit_dim(r.size()));
    Matrix p = Matrix::Zero(dim, dim);
    for (std::size_t idx : filtered_indices(r)) p(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
    return p;
}

inline FilterOutcome apply_filter(const DensityOperator& rho, const LevelAssignment& r, const Tolerances& tol = {}) {
    if (rho.dim() != qutrit_dim(r.size())) throw InputError("apply_filter: state and level assignment disagree");
    const auto idx = filtered_indices(r);
    const auto q = static_cast<Eigen::Index>(idx.size());
    Matrix sub(q, q);
    for (Eigen::Index j = 0; j < q; ++j)
        for (Eigen::Index i = 0; i < q; ++i)
            sub(i, j) = rho.matrix()(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                                     static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    const double raw = sub.trace().real();
    if (!(raw > tol.herald_floor)) throw HeraldError("apply_filter: herald never fires (p_suc <= floor)");
    FilterOutcome out{DensityOperator::unchecked(sub / raw, std::vector<int>(r.size(), 2)), std::min(1.0, raw), raw};
    return out;
}

inline double fidelity(const DensityOperator& rho, const TargetState& target) {
    if (rho.dim() != (std::size_t{1} << target.n_qubits())) throw InputError("fidelity: dimension mismatch");
    const Vector psi = target.vector();
    return std::clamp((psi.adjoint() * rho.matrix() * psi)(0, 0).real(), 0.0, 1.0);
}

/// Fidelity above 1/2 with a GHZ-type state certifies genuine multipartite entanglement.
inline bool gme_by_fidelity(double f) { return f > 0.5; }

inline double harmonic_number(int n) {
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    return h;
}

/// 4 / (3 [1 + 2 (N-1) h_{N-1}]).
inline double max_psuc_ghz(int n) {
    if (n < 2) throw InputError("max_psuc_ghz: N must be at least 2");
    return 4.0 / (3.0 * (1.0 + 2.0 * (n - 1) * harmonic_number(n - 1)));
}

struct LimitPoint {
    double ratio = 0.0;          ///< gamma_h / gamma_c
    double support_deviation = 0.0;  ///< max |rho'_{nn'} - c_n c_n'^*| over the support
    double diagonal_deviation = 0.0;
    double coherence_deviation = 0.0;
    double leakage = 0.0;        ///< max |rho'| entry outside the support block
    double fidelity = 0.0;
    double p_suc = 0.0;
};

struct LimitReport {
    std::vector<LimitPoint> points;
    bool monotone = false;         ///< deviation strictly decreases as the ratio decreases
    bool converged = false;        ///< deviation <= 1e-2 at the smallest ratio
};

/// Steady-state pipeline at each gamma_h / gamma_c (gamma_c and g from `spec`),
/// compared entrywise against |psi><psi| on the support.
inline LimitReport ideal_limit_check(const MachineSpec& spec, std::vector<double> ratios) {
    const auto hot = spec.levels().hot_sites();
    if (hot.size() != 1) throw InputError("limit check: exactly one hot qutrit required");
    double gamma_c = 0.0;
    for (std::size_t k = 0; k < spec.n(); ++k) {
        const auto& t = spec.baths().temperature[k];
        if (static_cast<int>(k) == hot.front()) {
            if (t.kind() != Temperature::Kind::Infinite) throw InputError("limit check: hot bath must be infinite");
        } else {
            if (t.kind() != Temperature::Kind::Zero) throw InputError("limit check: cold baths must be at zero");
            gamma_c = spec.baths().rate[k];
        }
    }
    std::sort(ratios.begin(), ratios.end(), std::greater<>());
    const Vector psi = spec.target().vector();
    std::vector<bool> in_support(static_cast<std::size_t>(psi.size()), false);
    for (const auto& t : spec.target().terms()) in_support[TargetState::qubit_index(t.bits)] = true;

    LimitReport report;
    for (double ratio : ratios) {
        if (!(ratio > 0.0)) throw InputError("limit check: ratios must be positive");
        const auto machine = spec.with_hot_cold(ratio * gamma_c, gamma_c, spec.g());
        const auto ss = steady_state(reset_liouvillian(machine));
        const auto out = apply_filter(ss.rho, machine.levels());
        const Matrix& h = out.heralded.matrix();
        LimitPoint p;
        p.ratio = ratio;
        p.p_suc = out.p_suc;
        p.fidelity = fidelity(out.heralded, spec.target());
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            for (Eigen::Index i = 0; i < h.rows(); ++i) {
                const bool si = in_support[static_cast<std::size_t>(i)];
                const bool sj = in_support[static_cast<std::size_t>(j)];
                if (si && sj) {
                    const double dev = std::abs(h(i, j) - psi(i) * std::conj(psi(j)));
                    (i == j ? p.diagonal_deviation : p.coherence_deviation) =
                        std::max(i == j ? p.diagonal_deviation : p.coherence_deviation, dev);
                } else {
                    p.leakage = std::max(p.leakage, std::abs(h(i, j)));
                }
            }
        }
        p.support_deviation = std::max(p.diagonal_deviation, p.coherence_deviation);
        report.points.push_back(p);
    }
    report.monotone = true;
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        if (!(report.points[i].support_deviation < report.points[i - 1].support_deviation)) report.monotone = false;
    }
    report.converged = !report.points.empty() && report.points.back().support_deviation <= 1e-2;
    return report;
}

} // namespace entengine
