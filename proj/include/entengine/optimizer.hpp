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

// Parameter sweeps: fidelity / success-probability Pareto fronts over the
// couplings, temperature grids, and Bell values along the fronts.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "entengine/bell.hpp"
#include "entengine/builder.hpp"
#include "entengine/dynamics.hpp"
#include "entengine/errors.hpp"
#include "entengine/filtering.hpp"

namespace entengine {

// ---------------------------------------------------------------------------
// Machine families

struct MachineFamily {
    enum class Kind { Ghz, Dicke, Cluster };
    Kind kind = Kind::Ghz;
    int n = 3;
    int l = 0;  ///< excitation number for Dicke; 0 otherwise

    static MachineFamily ghz(int n) { return {Kind::Ghz, n, 0}; }
    static MachineFamily dicke(int n, int l) { return {Kind::Dicke, n, l}; }
    static MachineFamily cluster() { return {Kind::Cluster, 4, 0}; }

    /// "ghz:3", "dicke:4:2", "cluster".
    static MachineFamily parse(const std::string& text) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const auto pos = text.find(':', start);
            parts.push_back(text.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        auto as_int = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(s, &used);
                if (used != s.size()) throw InputError("");
                return v;
            } catch (const std::exception&) {
                throw InputError("machine family: bad integer '" + s + "' in '" + text + "'");
            }
        };
        if (parts[0] == "ghz" && parts.size() == 2) return ghz(as_int(parts[1]));
        if (parts[0] == "dicke" && parts.size() == 3) return dicke(as_int(parts[1]), as_int(parts[2]));
        if (parts[0] == "cluster" && parts.size() == 1) return cluster();
        throw InputError("machine family: expected ghz:N, dicke:N:L or cluster, got '" + text + "'");
    }

    std::string name() const {
        switch (kind) {
            case Kind::Ghz: return "ghz";
            case Kind::Dicke: return "dicke";
            case Kind::Cluster: return "cluster";
        }
        return "?";
    }

    std::string label() const {
        switch (kind) {
            case Kind::Ghz: return "ghz:" + std::to_string(n);
            case Kind::Dicke: return "dicke:" + std::to_string(n) + ":" + std::to_string(l);
            case Kind::Cluster: return "cluster";
        }
        return "?";
    }

    /// Preset machine at T_c = 0, T_h = infinity.
    MachineSpec machine(const PresetCouplings& c = {}) const {
        if (n > static_cast<int>(kMaxQutrits)) {
            throw CapacityError("machine family: N = " + std::to_string(n) + " exceeds the " +
                                std::to_string(kMaxQutrits) + "-qutrit limit");
        }
        switch (kind) {
            case Kind::Ghz: return ghz_machine(n, c);
            case Kind::Dicke: return dicke_machine(n, l, c);
            case Kind::Cluster: return cluster_machine(c);
        }
        throw InputError("machine family: unknown kind");
    }

    bool has_bell() const { return kind == Kind::Cluster || (kind == Kind::Ghz && n >= 2 && n <= 4); }
    std::string bell_name() const { return kind == Kind::Cluster ? "cluster_B" : "mermin"; }
    double lhv_bound() const { return kind == Kind::Cluster ? kClusterLocalBound : kMerminLocalBound; }

    /// Bell value of a heralded state from this family's machine.
    double bell_value(const Matrix& heralded) const {
        if (kind == Kind::Cluster) return cluster_bell_value(cluster_frame_rotation(heralded));
        if (kind == Kind::Ghz) return mermin_value(heralded, default_mermin_settings(n));
        throw InputError("bell: no Bell expression for the " + name() + " family");
    }
};

// ---------------------------------------------------------------------------
// Parallel map

inline unsigned default_threads() { return std::max(1U, std::thread::hardware_concurrency()); }

/// out[i] = fn(i) for i < count. Results are merged by index, so the output
/// does not depend on the thread count; the lowest-index exception is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using T = decltype(fn(std::size_t{}));
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Sweep points and Pareto pruning

struct SweepPoint {
    double gamma_h = 0.0;
    double gamma_c = 0.0;
    double g = 0.0;
    double p_suc = 0.0;
    double fidelity = 0.0;
    std::optional<double> bell_value;

    bool operator==(const SweepPoint&) const = default;
};

namespace detail {
inline auto point_key(const SweepPoint& p) {
    return std::make_tuple(-p.p_suc, -p.fidelity, p.gamma_h, p.gamma_c, p.g);
}
} // namespace detail

/// Non-dominated subset sorted by p_suc ascending (fidelity then non-increasing).
/// A point is kept only if its fidelity beats every point of larger p_suc by more
/// than `f_tol`, which merges solver-noise duplicates.
inline std::vector<SweepPoint> pareto_prune(std::vector<SweepPoint> points, double f_tol = 1e-9) {
    std::sort(points.begin(), points.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return detail::point_key(a) < detail::point_key(b); });
    std::vector<SweepPoint> kept;
    double best_f = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        if (p.fidelity > best_f + f_tol) {
            kept.push_back(p);
            best_f = p.fidelity;
        }
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
}

struct ParetoFront {
    MachineFamily family;
    std::vector<SweepPoint> points;

    double max_p_suc() const {
        double m = 0.0;
        for (const auto& p : points) m = std::max(m, p.p_suc);
        return m;
    }

    /// Front point whose p_suc is closest to `p`.
    const SweepPoint& nearest(double p) const {
        if (points.empty()) throw InputError("front: empty");
        return *std::min_element(points.begin(), points.end(), [p](const SweepPoint& a, const SweepPoint& b) {
            return std::abs(a.p_suc - p) < std::abs(b.p_suc - p);
        });
    }
};

struct SweepOptions {
    int resolution = 25;
    double ratio_h_min = 1e-6;  ///< gamma_h / gamma_c range
    double ratio_h_max = 1e3;
    double ratio_g_min = 1e-3;  ///< g / gamma_c range
    double ratio_g_max = 1e3;
    double constraint = 1e-2;   ///< couplings bounded by constraint * min gap
    int refine_iterations = 20;
    double refine_step = 1.3;
    double refine_shrink = 0.7;
    std::vector<double> lambdas{0.0, 0.25, 1.0, 4.0};
    unsigned threads = default_threads();
    bool with_bell = false;
};

/// (gamma_h, gamma_c, g) for the given ratios, scaled so the largest coupling
/// sits on the weak-coupling boundary.
inline std::tuple<double, double, double> couplings_for_ratios(double ratio_h, double ratio_g, double bound) {
    const double gamma_c = bound / std::max({ratio_h, 1.0, ratio_g});
    return {ratio_h * gamma_c, gamma_c, ratio_g * gamma_c};
}

/// Steady state -> filter -> fidelity (and optionally the Bell value) for one coupling triple.
inline SweepPoint evaluate_couplings(const MachineSpec& base, const MachineFamily& family, double gamma_h,
                                     double gamma_c, double g, bool with_bell) {
    const auto m = base.with_hot_cold(gamma_h, gamma_c, g);
    const auto ss = machine_steady_state(m, reset_liouvillian(m, Frame::Interaction));
    const auto out = apply_filter(ss.rho, m.levels());
    SweepPoint p{gamma_h, gamma_c, g, out.p_suc, fidelity(out.heralded, m.target()), std::nullopt};
    if (with_bell) p.bell_value = family.bell_value(out.heralded.matrix());
    return p;
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw InputError("grid: need count >= 1 and 0 < lo <= hi");
    std::vector<double> out;
    if (count == 1) return {lo};
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
    return out;
}

namespace detail {

/// Coordinate descent on (log ratio_h, log ratio_g) maximizing F + lambda p_suc.
/// Returns every point it evaluated.
inline std::vector<SweepPoint> refine(const MachineSpec& base, const MachineFamily& family, const SweepOptions& o,
                                      double bound, double lambda, double ratio_h, double ratio_g) {
    const double lo[2] = {std::log(o.ratio_h_min), std::log(o.ratio_g_min)};
    const double hi[2] = {std::log(o.ratio_h_max), std::log(o.ratio_g_max)};
    std::map<std::pair<double, double>, SweepPoint> cache;
    std::vector<SweepPoint> seen;
    auto eval = [&](double x, double y) -> const SweepPoint& {
        const auto key = std::make_pair(x, y);
        auto it = cache.find(key);
        if (it == cache.end()) {
            const auto [gh, gc, g] = couplings_for_ratios(std::exp(x), std::exp(y), bound);
            it = cache.emplace(key, evaluate_couplings(base, family, gh, gc, g, o.with_bell)).first;
            seen.push_back(it->second);
        }
        return it->second;
    };
    auto objective = [lambda](const SweepPoint& p) { return p.fidelity + lambda * p.p_suc; };

    double pos[2] = {std::log(ratio_h), std::log(ratio_g)};
    double best = objective(eval(pos[0], pos[1]));
    double step = std::log(o.refine_step);
    for (int it = 0; it < o.refine_iterations; ++it) {
        bool improved = false;
        for (int c = 0; c < 2; ++c) {
            for (double dir : {1.0, -1.0}) {
                double trial[2] = {pos[0], pos[1]};
                trial[c] = std::clamp(pos[c] + dir * step, lo[c], hi[c]);
                if (trial[c] == pos[c]) continue;
                const double val = objective(eval(trial[0], trial[1]));
                if (val > best) {
                    best = val;
                    pos[0] = trial[0];
                    pos[1] = trial[1];
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= o.refine_shrink;
    }
    return seen;
}

} // namespace detail

/// Grid sweep over (gamma_h/gamma_c, g/gamma_c) at T_c = 0, T_h = infinity,
/// Pareto pruning, then coordinate-descent refinement from every retained point
/// for each lambda; all evaluated points are pruned again.
inline ParetoFront pareto_front(const MachineFamily& family, const SweepOptions& o = {}) {
    if (o.resolution < 2) throw InputError("pareto: resolution must be at least 2");
    if (o.with_bell && !family.has_bell()) throw InputError("bell: no Bell expression for " + family.label());
    const MachineSpec base = family.machine();
    const double bound = o.constraint * base.energies().min_gap();
    const auto rh = log_grid(o.ratio_h_min, o.ratio_h_max, o.resolution);
    const auto rg = log_grid(o.ratio_g_min, o.ratio_g_max, o.resolution);
    const std::size_t r = static_cast<std::size_t>(o.resolution);

    auto grid = parallel_map(r * r, o.threads, [&](std::size_t idx) {
        const auto [gh, gc, g] = couplings_for_ratios(rh[idx / r], rg[idx % r], bound);
        return evaluate_couplings(base, family, gh, gc, g, o.with_bell);
    });
    auto front = pareto_prune(grid);

    // One refinement run per (retained point, lambda); runs are independent.
    const std::size_t nl = o.lambdas.size();
    const auto refined = parallel_map(front.size() * nl, o.threads, [&](std::size_t i) {
        const auto& start = front[i / nl];
        return detail::refine(base, family, o, bound, o.lambdas[i % nl], start.gamma_h / start.gamma_c,
                              start.g / start.gamma_c);
    });
    for (const auto& batch : refined) front.insert(front.end(), batch.begin(), batch.end());
    return ParetoFront{family, pareto_prune(std::move(front))};
}

/// Pareto sweep with the family's Bell value attached to every point.
inline ParetoFront bell_sweep(const MachineFamily& family, SweepOptions o = {}) {
    o.with_bell = true;
    return pareto_front(family, o);
}

// ---------------------------------------------------------------------------
// Temperature grids

enum class Model { Reset, Lindblad };

inline Model parse_model(const std::string& s) {
    if (s == "reset") return Model::Reset;
    if (s == "lindblad") return Model::Lindblad;
    throw InputError("model: expected reset or lindblad, got '" + s + "'");
}

inline std::string to_string(Model m) { return m == Model::Reset ? "reset" : "lindblad"; }

struct TemperatureGrid {
    std::vector<double> t_h;
    std::vector<double> t_c;
    std::vector<std::vector<double>> fidelity;  ///< [i_c][i_h]
    std::vector<std::vector<double>> p_suc;
};

inline Temperature temperature_from_value(double t) {
    if (t == 0.0) return Temperature::zero();
    if (std::isinf(t) && t > 0.0) return Temperature::infinite();
    return Temperature::finite(t);
}

/// Fidelity and p_suc at every (T_h, T_c) with the couplings of `spec` held fixed.
/// The Lindblad model uses `jumps`, or JumpConfig::standard when absent.
inline TemperatureGrid temperature_sweep(const MachineSpec& spec, Model model, const std::vector<double>& t_h,
                                         const std::vector<double>& t_c,
                                         const std::optional<JumpConfig>& jumps = std::nullopt,
                                         unsigned threads = default_threads()) {
    detail::require_capacity(spec.n());
    if (t_h.empty() || t_c.empty()) throw InputError("temperature sweep: empty grid");
    if (spec.levels().hot_sites().size() != 1) throw InputError("temperature sweep: single-hot machine required");
    const JumpConfig jc = jumps.value_or(JumpConfig::standard(spec));
    const std::size_t nh = t_h.size();
    const auto cells = parallel_map(nh * t_c.size(), threads, [&](std::size_t idx) {
        const auto m = spec.with_hot_cold_temperatures(temperature_from_value(t_h[idx % nh]),
                                                       temperature_from_value(t_c[idx / nh]));
        const auto l = model == Model::Reset ? reset_liouvillian(m, Frame::Interaction)
                                             : lindblad_liouvillian(m, jc, Frame::Interaction);
        const auto out = apply_filter(machine_steady_state(m, l).rho, m.levels());
        return std::make_pair(fidelity(out.heralded, m.target()), out.p_suc);
    });
    TemperatureGrid grid{t_h, t_c, {}, {}};
    for (std::size_t c = 0; c < t_c.size(); ++c) {
        grid.fidelity.emplace_back();
        grid.p_suc.emplace_back();
        for (std::size_t h = 0; h < nh; ++h) {
            grid.fidelity.back().push_back(cells[c * nh + h].first);
            grid.p_suc.back().push_back(cells[c * nh + h].second);
        }
    }
    return grid;
}

/// +1 non-decreasing, -1 non-increasing, 0 neither (steps within `tol` count as flat).
inline int monotone_direction(const std::vector<double>& v, double tol = 1e-9) {
    bool up = true, down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] - tol) up = false;
        if (v[i] > v[i - 1] + tol) down = false;
    }
    if (up) return 1;
    if (down) return -1;
    return 0;
}

} // namespace entengine
