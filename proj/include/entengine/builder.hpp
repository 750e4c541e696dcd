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

// Machine construction: from an N-qubit target state to an N-qutrit machine
// (level assignment, energy ladders, Hamiltonians, thermal reset states).

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entengine/errors.hpp"
#include "entengine/lp.hpp"
#include "entengine/qcore.hpp"

namespace entengine {

using Bits = std::vector<int>;

struct Term {
    Bits bits;
    cplx amplitude;
};

/// Pure N-qubit state stored by its support set and amplitudes.
class TargetState {
public:
    TargetState(int n_qubits, std::vector<Term> terms) : n_(n_qubits), terms_(std::move(terms)) {
        if (n_ <= 0) throw InputError("target: n_qubits must be positive");
        if (n_ > 30) throw CapacityError("target: n_qubits too large");
        if (terms_.empty()) throw InputError("target: empty support");
        std::set<Bits> seen;
        double norm2 = 0.0;
        for (const auto& t : terms_) {
            if (static_cast<int>(t.bits.size()) != n_) throw InputError("target: bitstring length differs from n_qubits");
            for (int b : t.bits) {
                if (b != 0 && b != 1) throw InputError("target: bitstring entries must be 0 or 1");
            }
            if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag())) {
                throw InputError("target: non-finite amplitude");
            }
            if (std::abs(t.amplitude) == 0.0) throw InputError("target: zero amplitude in support");
            if (!seen.insert(t.bits).second) throw InputError("target: duplicate bitstring");
            norm2 += std::norm(t.amplitude);
        }
        if (std::abs(norm2 - 1.0) > 1e-12) throw InputError("target: amplitudes are not normalized");
    }

    /// Same as the constructor but rescales the amplitudes to unit norm first.
    static TargetState normalized(int n_qubits, std::vector<Term> terms) {
        double norm2 = 0.0;
        for (const auto& t : terms) norm2 += std::norm(t.amplitude);
        if (!(norm2 > 0.0)) throw InputError("target: zero norm");
        for (auto& t : terms) t.amplitude /= std::sqrt(norm2);
        return TargetState(n_qubits, std::move(terms));
    }

    int n_qubits() const noexcept { return n_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t support_size() const noexcept { return terms_.size(); }

    /// State vector in the 2^N computational basis (qubit 0 most significant).
    Vector vector() const {
        Vector v = Vector::Zero(Eigen::Index{1} << n_);
        for (const auto& t : terms_) v(static_cast<Eigen::Index>(qubit_index(t.bits))) = t.amplitude;
        return v;
    }

    static std::size_t qubit_index(const Bits& bits) {
        std::size_t idx = 0;
        for (int b : bits) idx = (idx << 1) | static_cast<std::size_t>(b);
        return idx;
    }

private:
    int n_;
    std::vector<Term> terms_;
};

/// Per-site excluded level R_k, restricted to {0, 2}.
struct LevelAssignment {
    std::vector<int> r;

    explicit LevelAssignment(std::vector<int> levels) : r(std::move(levels)) {
        if (r.empty()) throw InputError("level assignment: empty");
        for (int v : r) {
            if (v != 0 && v != 2) throw InputError("level assignment: entries must be 0 or 2");
        }
    }

    static LevelAssignment single_hot(int n, int hot) {
        std::vector<int> r(static_cast<std::size_t>(n), 0);
        r.at(static_cast<std::size_t>(hot)) = 2;
        return LevelAssignment(std::move(r));
    }

    std::size_t size() const noexcept { return r.size(); }

    std::vector<int> hot_sites() const {
        std::vector<int> out;
        for (std::size_t k = 0; k < r.size(); ++k)
            if (r[k] == 2) out.push_back(static_cast<int>(k));
        return out;
    }

    /// Qutrit level carrying qubit value `bit` at `site`: the lower/upper of the
    /// two levels complementary to R_k.
    int level(std::size_t site, int bit) const { return r[site] == 0 ? bit + 1 : bit; }

    /// Inverse of `level`; -1 when the level is the excluded one.
    int bit(std::size_t site, int level_) const {
        if (level_ == r[site]) return -1;
        return r[site] == 0 ? level_ - 1 : level_;
    }

    bool operator==(const LevelAssignment&) const = default;
};

struct EnergySpec {
    std::vector<double> delta1;
    std::vector<double> delta2;

    EnergySpec(std::vector<double> d1, std::vector<double> d2) : delta1(std::move(d1)), delta2(std::move(d2)) {
        if (delta1.size() != delta2.size() || delta1.empty()) throw InputError("energies: size mismatch");
        for (std::size_t k = 0; k < delta1.size(); ++k) {
            if (!(delta1[k] > 0.0) || !(delta2[k] > delta1[k]) || !std::isfinite(delta2[k])) {
                throw InputError("energies: require 0 < delta1 < delta2 at every site");
            }
        }
    }

    std::size_t size() const noexcept { return delta1.size(); }

    double level_energy(std::size_t site, int level) const {
        return level == 0 ? 0.0 : (level == 1 ? delta1[site] : delta2[site]);
    }

    /// Smallest gap between adjacent levels of any qutrit.
    double min_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < size(); ++k) g = std::min({g, delta1[k], delta2[k] - delta1[k]});
        return g;
    }

    EnergySpec scaled(double factor) const {
        std::vector<double> a = delta1, b = delta2;
        for (auto& v : a) v *= factor;
        for (auto& v : b) v *= factor;
        return EnergySpec(std::move(a), std::move(b));
    }
};

class Temperature {
public:
    enum class Kind { Zero, Finite, Infinite };

    static Temperature zero() { return Temperature(Kind::Zero, 0.0); }
    static Temperature infinite() { return Temperature(Kind::Infinite, std::numeric_limits<double>::infinity()); }
    static Temperature finite(double t) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("temperature: finite value must be positive");
        return Temperature(Kind::Finite, t);
    }

    Kind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }
    bool operator==(const Temperature&) const = default;

    std::string to_string() const {
        switch (kind_) {
            case Kind::Zero: return "zero";
            case Kind::Infinite: return "inf";
            case Kind::Finite: break;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", value_);
        return buf;
    }

private:
    Temperature(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

struct BathSpec {
    std::vector<Temperature> temperature;
    std::vector<double> rate;

    BathSpec(std::vector<Temperature> temps, std::vector<double> rates)
        : temperature(std::move(temps)), rate(std::move(rates)) {
        if (temperature.size() != rate.size() || rate.empty()) throw InputError("baths: size mismatch");
        for (double g : rate) {
            if (!(g > 0.0) || !std::isfinite(g)) throw InputError("baths: rates must be positive and finite");
        }
    }

    std::size_t size() const noexcept { return rate.size(); }
};

// ---------------------------------------------------------------------------
// Hamiltonians

inline std::vector<int> qutrit_dims(std::size_t n) { return std::vector<int>(n, 3); }

inline std::size_t qutrit_dim(std::size_t n) {
    std::size_t d = 1;
    for (std::size_t k = 0; k < n; ++k) d *= 3;
    return d;
}

/// Qutrit basis index of the embedded support string.
inline std::size_t embed_index(const Bits& bits, const LevelAssignment& r) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) idx = idx * 3 + static_cast<std::size_t>(r.level(k, bits[k]));
    return idx;
}

/// Qutrit basis index of |R_1 ... R_N>.
inline std::size_t excluded_index(const LevelAssignment& r) {
    std::size_t idx = 0;
    for (int v : r.r) idx = idx * 3 + static_cast<std::size_t>(v);
    return idx;
}

inline Vector embed_state(const TargetState& target, const LevelAssignment& r) {
    if (r.size() != static_cast<std::size_t>(target.n_qubits())) throw InputError("embed_state: size mismatch");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(qutrit_dim(r.size())));
    for (const auto& t : target.terms()) v(static_cast<Eigen::Index>(embed_index(t.bits, r))) = t.amplitude;
    return v / v.norm();
}

/// Diagonal of the free Hamiltonian.
inline Eigen::VectorXd free_energies(const EnergySpec& e) {
    const std::size_t n = e.size();
    const std::size_t dim = qutrit_dim(n);
    const auto dims = qutrit_dims(n);
    Eigen::VectorXd diag(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto digits = index_digits(i, dims);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += e.level_energy(k, digits[k]);
        diag(static_cast<Eigen::Index>(i)) = s;
    }
    return diag;
}

inline Matrix build_h_free(const EnergySpec& e) {
    return free_energies(e).cast<cplx>().asDiagonal();
}

inline Matrix build_h_int(const TargetState& target, const LevelAssignment& r, double g) {
    const auto dim = static_cast<Eigen::Index>(qutrit_dim(r.size()));
    const Vector psi_bar = embed_state(target, r);
    Vector rket = Vector::Zero(dim);
    rket(static_cast<Eigen::Index>(excluded_index(r))) = 1.0;
    return g * (psi_bar * rket.adjoint() + rket * psi_bar.adjoint());
}

/// Largest entry of |[H_int, H_free]|.
inline double check_energy_conservation(const Matrix& h_free, const Matrix& h_int) {
    if (h_free.rows() != h_int.rows() || h_free.cols() != h_int.cols()) {
        throw InputError("check_energy_conservation: dimension mismatch");
    }
    return max_abs(h_int * h_free - h_free * h_int);
}

/// E(embedded n) - E(R) for every support string; zero for all iff energy is conserved.
inline std::vector<double> energy_mismatches(const TargetState& target, const LevelAssignment& r,
                                             const EnergySpec& e) {
    double e_r = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) e_r += e.level_energy(k, r.r[k]);
    std::vector<double> out;
    for (const auto& t : target.terms()) {
        double en = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) en += e.level_energy(k, r.level(k, t.bits[k]));
        out.push_back(en - e_r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Energy-conservation feasibility

/// Margin used for the strict orderings 0 < delta1 < delta2.
inline constexpr double kEnergyMargin = 0.1;

/// Solves E(embedded n) = E(R) for all n in the support over the energies of
/// every site, for a fixed level assignment. Sites listed in `pinned` have
/// their (delta1, delta2) fixed. The witness is rescaled so that its smallest
/// gap is 1 unless some energy is pinned.
inline std::optional<EnergySpec> solve_energies(const TargetState& target, const LevelAssignment& r,
                                                const std::map<std::size_t, std::pair<double, double>>& pinned = {}) {
    const std::size_t n = r.size();
    if (n != static_cast<std::size_t>(target.n_qubits())) throw InputError("solve_energies: size mismatch");
    const double eps = kEnergyMargin;
    // delta1_k = eps + x_k, delta2_k = 2 eps + x_k + y_k with x, y >= 0.
    const auto nv = static_cast<Eigen::Index>(2 * n);
    const auto rows = static_cast<Eigen::Index>(target.support_size() + 2 * pinned.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, nv);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    Eigen::Index row = 0;
    for (const auto& t : target.terms()) {
        double rhs = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double c1 = 0.0, c2 = 0.0;  // coefficients of delta1_k, delta2_k
            if (r.r[k] == 2) {
                c1 = t.bits[k];
                c2 = -1.0;
            } else {
                c1 = 1.0 - t.bits[k];
                c2 = t.bits[k];
            }
            a(row, static_cast<Eigen::Index>(2 * k)) = c1 + c2;
            a(row, static_cast<Eigen::Index>(2 * k + 1)) = c2;
            rhs -= eps * (c1 + 2.0 * c2);
        }
        b(row++) = rhs;
    }
    for (const auto& [site, value] : pinned) {
        if (site >= n) throw InputError("solve_energies: pinned site out of range");
        const auto [d1, d2] = value;
        if (!(d1 >= eps) || !(d2 - d1 >= eps)) throw InputError("solve_energies: pinned energies violate the margin");
        a(row, static_cast<Eigen::Index>(2 * site)) = 1.0;
        b(row++) = d1 - eps;
        a(row, static_cast<Eigen::Index>(2 * site)) = 1.0;
        a(row, static_cast<Eigen::Index>(2 * site + 1)) = 1.0;
        b(row++) = d2 - 2.0 * eps;
    }
    const auto sol = lp::find_feasible_point(a, b);
    if (!sol.feasible) return std::nullopt;
    std::vector<double> d1(n), d2(n);
    for (std::size_t k = 0; k < n; ++k) {
        d1[k] = eps + sol.x(static_cast<Eigen::Index>(2 * k));
        d2[k] = d1[k] + eps + sol.x(static_cast<Eigen::Index>(2 * k + 1));
    }
    EnergySpec e(std::move(d1), std::move(d2));
    return pinned.empty() ? e.scaled(1.0 / e.min_gap()) : e;
}

struct SingleHotWitness {
    int hot = 0;  ///< zero-based index of the hot qutrit
    EnergySpec energies;
    LevelAssignment r;
};

/// Scans hot-site candidates in ascending order; first feasible one wins.
inline std::optional<SingleHotWitness> feasibility_single_hot(const TargetState& target) {
    for (int k = 0; k < target.n_qubits(); ++k) {
        auto r = LevelAssignment::single_hot(target.n_qubits(), k);
        if (auto e = solve_energies(target, r)) return SingleHotWitness{k, std::move(*e), std::move(r)};
    }
    return std::nullopt;
}

/// Turns a witness with several hot qutrits into one with only the first of
/// them hot. Each demoted site k uses t_k = 2 delta2_k.
inline std::pair<EnergySpec, LevelAssignment> reduce_to_single_hot(const TargetState& target,
                                                                   const EnergySpec& energies,
                                                                   const LevelAssignment& r) {
    if (energies.size() != r.size() || r.size() != static_cast<std::size_t>(target.n_qubits())) {
        throw InputError("reduce_to_single_hot: size mismatch");
    }
    const auto hot = r.hot_sites();
    if (hot.empty()) throw InputError("reduce_to_single_hot: no hot site");
    double scale = 0.0;
    for (double v : energies.delta2) scale = std::max(scale, v);
    for (double m : energy_mismatches(target, r, energies)) {
        if (std::abs(m) > 1e-9 * scale * static_cast<double>(r.size())) {
            throw InputError("reduce_to_single_hot: input does not conserve energy");
        }
    }
    if (hot.size() == 1) return {energies, r};

    std::vector<double> d1 = energies.delta1, d2 = energies.delta2;
    std::vector<int> levels = r.r;
    const auto keep = static_cast<std::size_t>(hot.front());
    double t_sum = 0.0;
    for (std::size_t i = 1; i < hot.size(); ++i) {
        const auto k = static_cast<std::size_t>(hot[i]);
        const double t = 2.0 * energies.delta2[k];
        d1[k] = t - energies.delta2[k];
        d2[k] = t - energies.delta2[k] + energies.delta1[k];
        levels[k] = 0;
        t_sum += t;
    }
    d2[keep] = energies.delta2[keep] + t_sum;
    return {EnergySpec(std::move(d1), std::move(d2)), LevelAssignment(std::move(levels))};
}

struct IdenticalEnergyWitness {
    std::vector<int> r;        ///< 1 marks a hot site
    std::optional<double> c;   ///< common negative ratio; empty when every pair satisfies the null condition
};

/// Exhaustive search over r in {0,1}^N \ {0, 1}, enumerated with site 0 as the
/// least significant bit of the counter.
inline std::optional<IdenticalEnergyWitness> identical_energy_feasibility(const TargetState& target) {
    const int n = target.n_qubits();
    if (n < 2) return std::nullopt;
    if (n > 24) throw CapacityError("identical_energy_feasibility: N too large for exhaustive search");
    const auto& terms = target.terms();
    const std::uint64_t limit = (std::uint64_t{1} << n) - 1;
    for (std::uint64_t mask = 1; mask < limit; ++mask) {
        long ref_num = 0, ref_den = 0;
        bool ok = true;
        for (std::size_t i = 0; i < terms.size() && ok; ++i) {
            for (std::size_t j = i + 1; j < terms.size() && ok; ++j) {
                long on = 0, off = 0;
                for (int k = 0; k < n; ++k) {
                    const int d = terms[i].bits[static_cast<std::size_t>(k)] - terms[j].bits[static_cast<std::size_t>(k)];
                    if ((mask >> k) & 1U) on += d; else off += d;
                }
                if (on == 0 && off == 0) continue;
                if (on == 0 || off == 0 || (on > 0) == (off > 0)) {
                    ok = false;
                } else if (ref_den == 0) {
                    ref_num = on;
                    ref_den = off;
                } else if (on * ref_den != ref_num * off) {
                    ok = false;
                }
            }
        }
        if (!ok) continue;
        IdenticalEnergyWitness w;
        for (int k = 0; k < n; ++k) w.r.push_back(static_cast<int>((mask >> k) & 1U));
        if (ref_den != 0) w.c = static_cast<double>(ref_num) / static_cast<double>(ref_den);
        return w;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Thermal states

inline Eigen::Vector3d thermal_populations(double delta1, double delta2, const Temperature& t) {
    switch (t.kind()) {
        case Temperature::Kind::Zero: return {1.0, 0.0, 0.0};
        case Temperature::Kind::Infinite: return Eigen::Vector3d::Constant(1.0 / 3.0);
        case Temperature::Kind::Finite: break;
    }
    Eigen::Vector3d w(1.0, std::exp(-delta1 / t.value()), std::exp(-delta2 / t.value()));
    return w / w.sum();
}

inline DensityOperator thermal_state(double delta1, double delta2, const Temperature& t) {
    if (!(delta1 > 0.0) || !(delta2 > delta1)) throw InputError("thermal_state: require 0 < delta1 < delta2");
    Matrix m = thermal_populations(delta1, delta2, t).cast<cplx>().asDiagonal();
    return DensityOperator(std::move(m), {3});
}

// ---------------------------------------------------------------------------
// Machine

/// Everything needed to build the Liouvillian of an entanglement engine.
class MachineSpec {
public:
    MachineSpec(TargetState target, LevelAssignment r, EnergySpec energies, BathSpec baths, double g,
                std::string family = "custom", const Tolerances& tol = {})
        : target_(std::move(target)), r_(std::move(r)), energies_(std::move(energies)), baths_(std::move(baths)),
          g_(g), family_(std::move(family)) {
        const auto n = static_cast<std::size_t>(target_.n_qubits());
        if (r_.size() != n || energies_.size() != n || baths_.size() != n) {
            throw InputError("machine: target, levels, energies and baths disagree on N");
        }
        if (!(g_ >= 0.0) || !std::isfinite(g_)) throw InputError("machine: g must be non-negative");
        // [H_int, H_free] has entries g c_n (E_R - E_n); energy conservation is
        // checked at unit coupling so that g = 0 machines are held to it too.
        const auto mismatch = energy_mismatches(target_, r_, energies_);
        double worst = 0.0;
        for (std::size_t i = 0; i < mismatch.size(); ++i) {
            worst = std::max(worst, std::abs(target_.terms()[i].amplitude) * std::abs(mismatch[i]));
        }
        commutator_ = g_ * worst;
        if (worst > tol.commutator) {
            throw InfeasibleError("machine: interaction does not conserve energy (commutator " +
                                  std::to_string(commutator_) + ")");
        }
        const double bound = 1e-2 * energies_.min_gap();
        weak_coupling_ = g_ <= bound;
        for (double rate : baths_.rate) weak_coupling_ = weak_coupling_ && rate <= bound;
    }

    const TargetState& target() const noexcept { return target_; }
    const LevelAssignment& levels() const noexcept { return r_; }
    const EnergySpec& energies() const noexcept { return energies_; }
    const BathSpec& baths() const noexcept { return baths_; }
    double g() const noexcept { return g_; }
    const std::string& family() const noexcept { return family_; }
    std::size_t n() const noexcept { return r_.size(); }
    std::size_t dim() const noexcept { return qutrit_dim(n()); }

    /// max |[H_int, H_free]| entry; equals g * max_n |E_n - E_R| for the swap interaction.
    double commutator() const noexcept { return commutator_; }
    /// g and all rates at most 1e-2 of the smallest gap.
    bool weak_coupling() const noexcept { return weak_coupling_; }

    Matrix h_free() const { return build_h_free(energies_); }
    Matrix h_int() const { return build_h_int(target_, r_, g_); }

    MachineSpec with_couplings(std::vector<double> rates, double g) const {
        return MachineSpec(target_, r_, energies_, BathSpec(baths_.temperature, std::move(rates)), g, family_);
    }

    MachineSpec with_temperatures(std::vector<Temperature> temps) const {
        return MachineSpec(target_, r_, energies_, BathSpec(std::move(temps), baths_.rate), g_, family_);
    }

    /// Hot site rate gamma_h and cold rate gamma_c for single-hot machines.
    MachineSpec with_hot_cold(double gamma_h, double gamma_c, double g) const {
        std::vector<double> rates(n());
        for (std::size_t k = 0; k < n(); ++k) rates[k] = r_.r[k] == 2 ? gamma_h : gamma_c;
        return with_couplings(std::move(rates), g);
    }

    MachineSpec with_hot_cold_temperatures(const Temperature& t_h, const Temperature& t_c) const {
        std::vector<Temperature> temps;
        for (std::size_t k = 0; k < n(); ++k) temps.push_back(r_.r[k] == 2 ? t_h : t_c);
        return with_temperatures(std::move(temps));
    }

private:
    TargetState target_;
    LevelAssignment r_;
    EnergySpec energies_;
    BathSpec baths_;
    double g_;
    std::string family_;
    double commutator_ = 0.0;
    bool weak_coupling_ = false;
};

// ---------------------------------------------------------------------------
// Presets

/// Reset parameters shared by the presets.
struct PresetCouplings {
    double gamma_h = 1e-4;
    double gamma_c = 5e-3;
    double g = 1.6e-3;
};

inline Bits bits_from_string(const std::string& s) {
    if (s.empty()) throw InputError("bitstring is empty");
    Bits b;
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw InputError("bitstring must contain only 0 and 1");
        b.push_back(ch - '0');
    }
    return b;
}

/// (|0...0> + |1...1>)/sqrt2 when `flipped` is false, (|10...0> + |01...1>)/sqrt2 otherwise.
inline TargetState ghz_target(int n, bool flipped = true) {
    if (n < 2) throw InputError("ghz: N must be at least 2");
    Bits a(static_cast<std::size_t>(n), 0), b(static_cast<std::size_t>(n), 1);
    if (flipped) {
        a[0] = 1;
        b[0] = 0;
    }
    const double s = 1.0 / std::sqrt(2.0);
    return TargetState(n, {{a, s}, {b, s}});
}

inline TargetState dicke_target(int n, int l) {
    if (n < 2) throw InputError("dicke: N must be at least 2");
    if (l < 1 || l > n - 1) throw InputError("dicke: require 1 <= l <= N-1");
    if (n > 20) throw CapacityError("dicke: N too large");
    std::vector<Term> terms;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        if (std::popcount(mask) != l) continue;
        Bits bits(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) bits[static_cast<std::size_t>(k)] = static_cast<int>((mask >> (n - 1 - k)) & 1U);
        terms.push_back({bits, 1.0});
    }
    return TargetState::normalized(n, std::move(terms));
}

/// Linear four-qubit cluster state (|0110> + |0101> + |1010> - |1001>)/2.
inline TargetState cluster_target() {
    return TargetState(4, {{bits_from_string("0110"), 0.5},
                           {bits_from_string("0101"), 0.5},
                           {bits_from_string("1010"), 0.5},
                           {bits_from_string("1001"), -0.5}});
}

inline BathSpec hot_cold_baths(const LevelAssignment& r, const PresetCouplings& c) {
    std::vector<Temperature> temps;
    std::vector<double> rates;
    for (int v : r.r) {
        temps.push_back(v == 2 ? Temperature::infinite() : Temperature::zero());
        rates.push_back(v == 2 ? c.gamma_h : c.gamma_c);
    }
    return BathSpec(std::move(temps), std::move(rates));
}

/// Hot qutrit energies (1, 2.5); the N-1 cold qutrits share
/// ((d2_h - d1_h)/(N-1), d2_h/(N-1)).
inline MachineSpec ghz_machine(int n, const PresetCouplings& c = {}) {
    const double d1h = 1.0, d2h = 2.5;
    const double nc = n - 1;
    std::vector<double> d1(static_cast<std::size_t>(n), (d2h - d1h) / nc), d2(static_cast<std::size_t>(n), d2h / nc);
    d1[0] = d1h;
    d2[0] = d2h;
    auto r = LevelAssignment::single_hot(n, 0);
    auto baths = hot_cold_baths(r, c);
    return MachineSpec(ghz_target(n), std::move(r), EnergySpec(std::move(d1), std::move(d2)), std::move(baths), c.g,
                       "ghz");
}

namespace detail {

/// Hot qutrit first with the given closed-form energies; cold qutrits share
/// (1, 2.5). Falls back to solving for the hot energies with the cold ones
/// pinned when the closed form does not conserve energy.
inline MachineSpec hot_first_machine(TargetState target, double d1h, double d2h, const PresetCouplings& c,
                                     std::string family) {
    const int n = target.n_qubits();
    const double d1c = 1.0, d2c = 2.5;
    auto r = LevelAssignment::single_hot(n, 0);
    std::vector<double> d1(static_cast<std::size_t>(n), d1c), d2(static_cast<std::size_t>(n), d2c);
    d1[0] = d1h;
    d2[0] = d2h;
    EnergySpec energies(d1, d2);
    double worst = 0.0;
    for (double m : energy_mismatches(target, r, energies)) worst = std::max(worst, std::abs(m));
    if (worst > 1e-12) {
        std::map<std::size_t, std::pair<double, double>> pinned;
        for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) pinned[k] = {d1c, d2c};
        auto solved = solve_energies(target, r, pinned);
        if (!solved) throw InfeasibleError(family + ": no energy-conserving hot spectrum for cold (1, 2.5)");
        energies = *solved;
    }
    auto baths = hot_cold_baths(r, c);
    return MachineSpec(std::move(target), std::move(r), std::move(energies), std::move(baths), c.g, std::move(family));
}

} // namespace detail

inline MachineSpec dicke_machine(int n, int l, const PresetCouplings& c = {}) {
    auto target = dicke_target(n, l);
    const double gap = 2.5 - 1.0;
    return detail::hot_first_machine(std::move(target), (n - 1) + (l - 1) * gap, (n - 1) + l * gap, c, "dicke");
}

inline MachineSpec cluster_machine(const PresetCouplings& c = {}) {
    const double gap = 2.5 - 1.0;
    return detail::hot_first_machine(cluster_target(), 3.0 + gap, 3.0 + 2.0 * gap, c, "cluster");
}

/// Machine for an arbitrary target using the single-hot feasibility witness.
inline MachineSpec machine_for_target(const TargetState& target, const PresetCouplings& c = {}) {
    auto w = feasibility_single_hot(target);
    if (!w) throw InfeasibleError("target admits no single-hot energy-conserving machine");
    auto baths = hot_cold_baths(w->r, c);
    return MachineSpec(target, w->r, w->energies, std::move(baths), c.g, "custom");
}

} // namespace entengine
