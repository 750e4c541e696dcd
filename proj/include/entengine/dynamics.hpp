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

// Reset-model and Lindblad-form Liouvillians on vectorized density matrices,
// the steady-state solver and an RK4 integrator used to cross-check it.

#pragma once

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "entengine/builder.hpp"
#include "entengine/errors.hpp"
#include "entengine/qcore.hpp"

namespace entengine {

/// Largest machine handled by the dense-state / sparse-superoperator pathway.
inline constexpr std::size_t kMaxQutrits = 5;

/// Sparse superoperator acting on column-stacked density matrices.
class Liouvillian {
public:
    Liouvillian(SparseMatrix action, std::vector<int> site_dims)
        : action_(std::move(action)), dims_(std::move(site_dims)), dim_(total_dim(dims_)) {
        if (static_cast<std::size_t>(action_.rows()) != dim_ * dim_ || action_.rows() != action_.cols()) {
            throw InputError("liouvillian: superoperator does not match the site dimensions");
        }
        action_.makeCompressed();
    }

    const SparseMatrix& action() const noexcept { return action_; }
    const std::vector<int>& site_dims() const noexcept { return dims_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t dim2() const noexcept { return dim_ * dim_; }

    Matrix apply(const Matrix& rho) const {
        const Vector out = action_ * vectorize(rho);
        return devectorize(out, dim_);
    }

    /// Largest row sum of |L| entries.
    double max_row_sum() const {
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(action_.rows());
        for (long j = 0; j < action_.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(action_, j); it; ++it) sums(it.row()) += std::abs(it.value());
        return sums.size() ? sums.maxCoeff() : 0.0;
    }

    Liouvillian operator+(const Liouvillian& other) const {
        if (other.dims_ != dims_) throw InputError("liouvillian: adding superoperators on different spaces");
        return Liouvillian(SparseMatrix(action_ + other.action_), dims_);
    }

private:
    SparseMatrix action_;
    std::vector<int> dims_;
    std::size_t dim_;
};

/// Whether the free-Hamiltonian rotation is included. Because the interaction
/// conserves energy and both dissipators are covariant under the free
/// evolution, the two frames share their steady state; the interaction frame
/// removes the fast Bohr frequencies and so permits large RK4 steps.
enum class Frame { Lab, Interaction };

namespace detail {

inline void require_capacity(std::size_t n) {
    if (n > kMaxQutrits) {
        throw CapacityError("machines with more than " + std::to_string(kMaxQutrits) + " qutrits are not supported");
    }
}

/// Triplets of -i[H, .] for a sparse Hamiltonian.
inline void add_commutator(std::vector<Triplet>& trips, const SparseMatrix& h, long d) {
    for (long b = 0; b < h.outerSize(); ++b) {
        for (SparseMatrix::InnerIterator it(h, b); it; ++it) {
            const long a = it.row();
            const cplx v = it.value();
            for (long j = 0; j < d; ++j) trips.emplace_back(a + j * d, b + j * d, -kI * v);   // H rho
            for (long i = 0; i < d; ++i) trips.emplace_back(i + b * d, i + a * d, kI * v);    // rho H (H(a,b) at col b)
        }
    }
}

inline SparseMatrix machine_hamiltonian(const MachineSpec& spec, Frame frame) {
    const auto d = static_cast<long>(spec.dim());
    std::vector<Triplet> trips;
    if (frame == Frame::Lab) {
        const auto e = free_energies(spec.energies());
        for (long i = 0; i < d; ++i)
            if (e(i) != 0.0) trips.emplace_back(i, i, e(i));
    }
    if (spec.g() != 0.0) {
        const Vector psi_bar = embed_state(spec.target(), spec.levels());
        const auto rr = static_cast<long>(excluded_index(spec.levels()));
        for (long i = 0; i < d; ++i) {
            if (psi_bar(i) == cplx{}) continue;
            trips.emplace_back(i, rr, spec.g() * psi_bar(i));
            trips.emplace_back(rr, i, spec.g() * std::conj(psi_bar(i)));
        }
    }
    SparseMatrix h(d, d);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

/// Triplets of D[A] rho = A rho A^dag - {A^dag A, rho}/2, scaled by `rate`.
inline void add_dissipator(std::vector<Triplet>& trips, const SparseMatrix& a, double rate, long d) {
    SparseMatrix id(d, d);
    id.setIdentity();
    const SparseMatrix ad = a.adjoint();
    const SparseMatrix ada = ad * a;
    const SparseMatrix jump = kron(SparseMatrix(a.conjugate()), a);
    const SparseMatrix left = kron(id, ada);
    const SparseMatrix right = kron(SparseMatrix(ada.transpose()), id);
    for (const auto* m : {&jump, &left, &right}) {
        const double w = m == &jump ? rate : -0.5 * rate;
        for (long j = 0; j < m->outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(*m, j); it; ++it) trips.emplace_back(it.row(), it.col(), w * it.value());
    }
}

} // namespace detail

/// L[rho] = -i[H_free + H_int, rho] + sum_k gamma_k (tau_k (x)_k Tr_k rho - rho).
inline Liouvillian reset_liouvillian(const MachineSpec& spec, Frame frame = Frame::Lab) {
    detail::require_capacity(spec.n());
    const auto dims = qutrit_dims(spec.n());
    const auto d = static_cast<long>(spec.dim());
    std::vector<Triplet> trips;
    detail::add_commutator(trips, detail::machine_hamiltonian(spec, frame), d);

    double total_rate = 0.0;
    for (std::size_t k = 0; k < spec.n(); ++k) {
        const double gamma = spec.baths().rate[k];
        total_rate += gamma;
        const auto pops = thermal_populations(spec.energies().delta1[k], spec.energies().delta2[k],
                                              spec.baths().temperature[k]);
        const auto stride = static_cast<long>(site_stride(dims, k));
        for (long j = 0; j < d; ++j) {
            const long jk = (j / stride) % 3;
            for (long i = 0; i < d; ++i) {
                const long ik = (i / stride) % 3;
                if (ik != jk || pops(ik) == 0.0) continue;
                const long row = i + j * d;
                for (long m = 0; m < 3; ++m) {
                    const long shift = (m - ik) * stride;
                    trips.emplace_back(row, (i + shift) + (j + shift) * d, gamma * pops(ik));
                }
            }
        }
    }
    for (long i = 0; i < d * d; ++i) trips.emplace_back(i, i, -total_rate);

    SparseMatrix l(d * d, d * d);
    l.setFromTriplets(trips.begin(), trips.end());
    return Liouvillian(std::move(l), dims);
}

struct Transition {
    int lower = 0;
    int upper = 1;
    bool operator==(const Transition&) const = default;
};

/// Bath-coupled transitions and rate per qutrit for the Lindblad model.
struct JumpConfig {
    std::vector<std::vector<Transition>> transitions;
    std::vector<double> rates;

    JumpConfig(std::vector<std::vector<Transition>> t, std::vector<double> r)
        : transitions(std::move(t)), rates(std::move(r)) {
        if (transitions.size() != rates.size()) throw InputError("jumps: size mismatch");
        for (double g : rates) {
            if (!(g > 0.0) || !std::isfinite(g)) throw InputError("jumps: rates must be positive and finite");
        }
        for (const auto& site : transitions) {
            for (const auto& tr : site) {
                if (tr.lower < 0 || tr.upper > 2 || tr.lower >= tr.upper) {
                    throw InputError("jumps: invalid transition pair");
                }
            }
        }
    }

    /// (0,1) and (0,2) on every qutrit with rates equal to the machine's reset rates;
    /// the (1,2) transition is suppressed.
    static JumpConfig standard(const MachineSpec& spec) { return uniform(spec, {{0, 1}, {0, 2}}); }

    static JumpConfig uniform(const MachineSpec& spec, const std::vector<Transition>& pairs) {
        return JumpConfig(std::vector<std::vector<Transition>>(spec.n(), pairs), spec.baths().rate);
    }

    std::string describe() const {
        std::string s;
        for (std::size_t k = 0; k < transitions.size(); ++k) {
            if (k) s += ";";
            for (std::size_t i = 0; i < transitions[k].size(); ++i) {
                if (i) s += ",";
                s += "(" + std::to_string(transitions[k][i].lower) + "," + std::to_string(transitions[k][i].upper) + ")";
            }
        }
        return s;
    }
};

/// Bose-Einstein occupation; zero at zero temperature.
inline double bose_einstein(double energy, const Temperature& t) {
    switch (t.kind()) {
        case Temperature::Kind::Zero: return 0.0;
        case Temperature::Kind::Infinite: return std::numeric_limits<double>::infinity();
        case Temperature::Kind::Finite: break;
    }
    return 1.0 / std::expm1(energy / t.value());
}

/// Upward and downward rates of one transition. At infinite temperature both
/// equal the bare rate.
inline std::pair<double, double> transition_rates(double rate, double energy, const Temperature& t) {
    if (t.kind() == Temperature::Kind::Infinite) return {rate, rate};
    const double nb = bose_einstein(energy, t);
    return {rate * nb, rate * (1.0 + nb)};
}

/// L[rho] = -i[H, rho] + sum Gamma n_B D[A+] rho + sum Gamma (1 + n_B) D[A-] rho.
inline Liouvillian lindblad_liouvillian(const MachineSpec& spec, const JumpConfig& jumps, Frame frame = Frame::Lab) {
    detail::require_capacity(spec.n());
    if (jumps.transitions.size() != spec.n()) throw InputError("lindblad: jump config does not match machine size");
    const auto dims = qutrit_dims(spec.n());
    const auto d = static_cast<long>(spec.dim());
    std::vector<Triplet> trips;
    detail::add_commutator(trips, detail::machine_hamiltonian(spec, frame), d);
    for (std::size_t k = 0; k < spec.n(); ++k) {
        for (const auto& tr : jumps.transitions[k]) {
            const double energy =
                spec.energies().level_energy(k, tr.upper) - spec.energies().level_energy(k, tr.lower);
            const auto [up, down] = transition_rates(jumps.rates[k], energy, spec.baths().temperature[k]);
            Matrix lower = Matrix::Zero(3, 3);
            lower(tr.lower, tr.upper) = 1.0;
            if (down > 0.0) detail::add_dissipator(trips, local_operator(lower, dims, k), down, d);
            if (up > 0.0) detail::add_dissipator(trips, local_operator(lower.adjoint(), dims, k), up, d);
        }
    }
    SparseMatrix l(d * d, d * d);
    l.setFromTriplets(trips.begin(), trips.end());
    return Liouvillian(std::move(l), dims);
}

/// Pure Hamiltonian generator -i[H, .].
inline Liouvillian hamiltonian_liouvillian(const Matrix& h, std::vector<int> dims) {
    const auto d = static_cast<long>(h.rows());
    std::vector<Triplet> trips;
    detail::add_commutator(trips, SparseMatrix(h.sparseView()), d);
    SparseMatrix l(d * d, d * d);
    l.setFromTriplets(trips.begin(), trips.end());
    return Liouvillian(std::move(l), std::move(dims));
}

// ---------------------------------------------------------------------------
// Steady state

struct SteadyState {
    DensityOperator rho;
    double residual = 0.0;     ///< max |L[rho]| entry
    double norm = 0.0;         ///< estimate of ||L||_2
    double sigma_null = 0.0;   ///< ||L v|| / ||v|| for v = vec(rho)
    double sigma_gap = 0.0;    ///< smallest singular value of the trace-bordered system
};

namespace detail {

inline double spectral_norm(const SparseMatrix& l, int iterations = 30) {
    Vector x = Vector::Ones(l.cols()).normalized();
    double s = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vector y = l.adjoint() * (l * x);
        s = y.norm();
        if (s == 0.0) return 0.0;
        x = y / s;
    }
    return std::sqrt(s);
}

} // namespace detail

/// Vectorized indices i + j d of the entries |i><j| with E_i = E_j. This sector is
/// invariant under machine Liouvillians whose interaction conserves energy and
/// whose dissipators are diagonal in the energy basis, and contains the steady state.
inline std::vector<long> zero_frequency_sector(const Eigen::VectorXd& energies, double rel_tol = 1e-9) {
    const long d = energies.size();
    const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
    std::vector<long> out;
    for (long j = 0; j < d; ++j)
        for (long i = 0; i < d; ++i)
            if (std::abs(energies(i) - energies(j)) <= rel_tol * scale) out.push_back(i + j * d);
    return out;
}

/// Steady state of L restricted to an invariant subspace of vectorized operators
/// that contains every diagonal entry. The square system replaces the last row of
/// the restricted L with the trace functional. Throws DegenerateSteadyStateError
/// when the numerical null space of the restricted L is not one-dimensional.
inline SteadyState steady_state_in_sector(const Liouvillian& liou, const std::vector<long>& sector,
                                          const Tolerances& tol = {}) {
    const auto d = static_cast<long>(liou.dim());
    const long full = d * d;
    const auto n = static_cast<long>(sector.size());
    std::vector<long> local(static_cast<std::size_t>(full), -1);
    for (long k = 0; k < n; ++k) {
        const long g = sector[static_cast<std::size_t>(k)];
        if (g < 0 || g >= full || local[static_cast<std::size_t>(g)] != -1) {
            throw InputError("steady_state: sector indices out of range or repeated");
        }
        local[static_cast<std::size_t>(g)] = k;
    }
    for (long i = 0; i < d; ++i) {
        if (local[static_cast<std::size_t>(i + i * d)] < 0) throw InputError("steady_state: sector misses a diagonal entry");
    }

    const SparseMatrix& l = liou.action();
    std::vector<Triplet> restricted;
    for (long j = 0; j < l.outerSize(); ++j) {
        const long lj = local[static_cast<std::size_t>(j)];
        if (lj < 0) continue;
        for (SparseMatrix::InnerIterator it(l, j); it; ++it) {
            const long li = local[static_cast<std::size_t>(it.row())];
            if (li < 0) {
                if (it.value() != cplx(0.0)) throw InputError("steady_state: sector is not invariant under L");
                continue;
            }
            restricted.emplace_back(li, lj, it.value());
        }
    }
    SparseMatrix lr(n, n);
    lr.setFromTriplets(restricted.begin(), restricted.end());

    std::vector<Triplet> trips;
    trips.reserve(restricted.size() + static_cast<std::size_t>(d));
    for (const auto& t : restricted)
        if (t.row() != n - 1) trips.push_back(t);
    for (long i = 0; i < d; ++i) trips.emplace_back(n - 1, local[static_cast<std::size_t>(i + i * d)], 1.0);
    SparseMatrix bordered(n, n);
    bordered.setFromTriplets(trips.begin(), trips.end());
    bordered.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<long>> lu;
    lu.compute(bordered);
    if (lu.info() != Eigen::Success) {
        throw DegenerateSteadyStateError("steady_state: bordered Liouvillian is singular (" + lu.lastErrorMessage() + ")");
    }
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    const Vector x = lu.solve(rhs);

    SteadyState out{DensityOperator::unchecked(Matrix(), liou.site_dims())};
    out.norm = detail::spectral_norm(lr);
    out.sigma_null = (lr * x).norm() / x.norm();

    // Inverse iteration on (B^H B)^-1 for the smallest singular value of B.
    Vector v = Vector::Ones(n).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 25; ++it) {
        Vector w = lu.adjoint().solve(Vector(lu.solve(v)));
        lambda = w.norm();
        if (!std::isfinite(lambda) || lambda == 0.0) break;
        v = w / lambda;
    }
    out.sigma_gap = (std::isfinite(lambda) && lambda > 0.0) ? 1.0 / std::sqrt(lambda) : 0.0;

    const double floor = std::max(tol.gap_rel, static_cast<double>(n) * std::numeric_limits<double>::epsilon());
    if (!(out.sigma_gap > floor * out.norm) || !(out.sigma_null <= tol.null_rel * out.norm)) {
        throw DegenerateSteadyStateError("steady_state: steady state is not unique (sigma_gap/||L|| = " +
                                         std::to_string(out.sigma_gap / out.norm) + ")");
    }

    Vector xf = Vector::Zero(full);
    for (long k = 0; k < n; ++k) xf(sector[static_cast<std::size_t>(k)]) = x(k);
    Matrix rho = devectorize(xf, liou.dim());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    out.residual = max_abs(liou.apply(rho));
    out.rho = DensityOperator::unchecked(std::move(rho), liou.site_dims());
    return out;
}

/// Unique steady state of L over the full operator space.
inline SteadyState steady_state(const Liouvillian& liou, const Tolerances& tol = {}) {
    std::vector<long> all(liou.dim2());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<long>(k);
    return steady_state_in_sector(liou, all, tol);
}

/// Steady state of a machine Liouvillian solved in its zero-frequency sector.
inline SteadyState machine_steady_state(const MachineSpec& spec, const Liouvillian& liou, const Tolerances& tol = {}) {
    return steady_state_in_sector(liou, zero_frequency_sector(free_energies(spec.energies())), tol);
}

// ---------------------------------------------------------------------------
// Time evolution

/// Classical RK4 for d rho/dt = L[rho]. Requires dt <= 0.1 / max row sum of |L|.
inline DensityOperator evolve(const Liouvillian& liou, const DensityOperator& rho0, double t_final, double dt) {
    if (rho0.dim() != liou.dim()) throw InputError("evolve: state and Liouvillian dimensions differ");
    if (!(t_final >= 0.0) || !(dt > 0.0)) throw InputError("evolve: require t_final >= 0 and dt > 0");
    const double bound = 0.1 / std::max(liou.max_row_sum(), 1e-300);
    if (dt > bound * (1.0 + 1e-12)) throw InputError("evolve: dt exceeds the RK4 stability bound");
    const auto steps = static_cast<long>(std::ceil(t_final / dt));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;
    const SparseMatrix& l = liou.action();
    const auto d = static_cast<long>(liou.dim());
    Vector x = vectorize(rho0.matrix());
    const cplx trace0 = rho0.matrix().trace();
    auto trace_of = [d](const Vector& v) {
        cplx t = 0.0;
        for (long i = 0; i < d; ++i) t += v(i + i * d);
        return t;
    };
    Vector k1, k2, k3, k4;
    for (long s = 0; s < steps; ++s) {
        k1 = l * x;
        k2 = l * (x + 0.5 * h * k1);
        k3 = l * (x + 0.5 * h * k2);
        k4 = l * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((s & 1023) == 0 && std::abs(trace_of(x) - trace0) > 1e-8) {
            throw InstabilityError("evolve: trace drift exceeded 1e-8");
        }
    }
    if (std::abs(trace_of(x) - trace0) > 1e-8) throw InstabilityError("evolve: trace drift exceeded 1e-8");
    return DensityOperator::unchecked(devectorize(x, liou.dim()), rho0.site_dims());
}

/// Maps an interaction-frame state at time t back to the lab frame.
inline Matrix to_lab_frame(const Matrix& rho_interaction, const Eigen::VectorXd& energies, double t) {
    Matrix out = rho_interaction;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) *= std::exp(-kI * (energies(i) - energies(j)) * t);
    return out;
}

} // namespace entengine
