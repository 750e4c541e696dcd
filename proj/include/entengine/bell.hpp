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

// Bell expressions evaluated on heralded qubit states: a modified Mermin
// family and a four-qubit cluster-state operator.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "entengine/errors.hpp"
#include "entengine/qcore.hpp"

namespace entengine {

using Matrix2 = Eigen::Matrix2cd;

namespace pauli {
inline Matrix2 identity() { return Matrix2::Identity(); }
inline Matrix2 x() { Matrix2 m; m << 0, 1, 1, 0; return m; }
inline Matrix2 y() { Matrix2 m; m << 0, -kI, kI, 0; return m; }
inline Matrix2 z() { Matrix2 m; m << 1, 0, 0, -1; return m; }
} // namespace pauli

/// Two +-1-valued observables per party, given as explicit 2x2 matrices.
struct MeasurementSettings {
    std::vector<std::array<Matrix2, 2>> parties;

    explicit MeasurementSettings(std::vector<std::array<Matrix2, 2>> p) : parties(std::move(p)) {
        if (parties.empty()) throw InputError("settings: no parties");
        for (const auto& obs : parties) {
            for (const auto& a : obs) {
                if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
                    (a * a - Matrix2::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
                    throw InputError("settings: observables must be Hermitian and square to identity");
                }
            }
        }
    }

    std::size_t size() const noexcept { return parties.size(); }
};

/// Settings that maximally violate the modified Mermin expression with GHZ states.
inline MeasurementSettings default_mermin_settings(int n) {
    const double s = 1.0 / std::sqrt(2.0);
    using namespace pauli;
    switch (n) {
        case 2: return MeasurementSettings({{z(), x()}, {s * (z() + x()), s * (z() - x())}});
        case 3: return MeasurementSettings({{x(), y()}, {x(), y()}, {x(), y()}});
        case 4:
            return MeasurementSettings({{x(), y()},
                                        {s * (x() + y()), s * (x() - y())},
                                        {s * (x() + y()), s * (x() - y())},
                                        {s * (x() + y()), s * (x() - y())}});
        default: throw InputError("default_mermin_settings: supported for N = 2, 3, 4");
    }
}

/// <(x)_k ops[k]>_rho, real part.
inline double correlator(const Matrix& rho, const std::vector<Matrix2>& ops) {
    if (rho.rows() != (Eigen::Index{1} << ops.size())) throw InputError("correlator: dimension mismatch");
    Matrix op = Matrix::Identity(1, 1);
    for (const auto& o : ops) op = kron(op, Matrix(o));
    return (rho * op).trace().real();
}

/// 2^-N sum_x |< prod_k (A0_k + (-1)^{x_k} A1_k) >|; local bound 1.
inline double mermin_value(const Matrix& rho, const MeasurementSettings& settings) {
    const std::size_t n = settings.size();
    if (rho.rows() != (Eigen::Index{1} << n) || rho.cols() != rho.rows()) {
        throw InputError("mermin_value: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
        std::vector<Matrix2> ops;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& p = settings.parties[k];
            const bool flip = (x >> (n - 1 - k)) & 1U;
            ops.push_back(flip ? Matrix2(p[0] - p[1]) : Matrix2(p[0] + p[1]));
        }
        total += std::abs(correlator(rho, ops));
    }
    return total / static_cast<double>(std::size_t{1} << n);
}

inline constexpr double kMerminLocalBound = 1.0;
inline constexpr double kClusterLocalBound = 2.0;

/// <XYYX> + <XYXY> + <IZXX> - <IZYY>, for states in the frame of
/// (|0000> + |0011> + |1100> - |1111>)/2.
inline double cluster_bell_value(const Matrix& rho) {
    if (rho.rows() != 16 || rho.cols() != 16) throw InputError("cluster_bell_value: expects a 4-qubit state");
    using namespace pauli;
    return correlator(rho, {x(), y(), y(), x()}) + correlator(rho, {x(), y(), x(), y()}) +
           correlator(rho, {identity(), z(), x(), x()}) - correlator(rho, {identity(), z(), y(), y()});
}

/// Per-qubit factors of the local unitary taking the machine's cluster state
/// (|0110> + |0101> + |1010> - |1001>)/2 to the Bell-operator frame, up to a
/// global phase. Found by exhaustive search over single-qubit Clifford
/// products; the search is repeated in the test suite.
inline std::array<Matrix2, 4> cluster_frame_factors() {
    return {pauli::z(), pauli::x(), pauli::identity(), pauli::x()};
}

inline Matrix cluster_frame_unitary() {
    Matrix u = Matrix::Identity(1, 1);
    for (const auto& f : cluster_frame_factors()) u = kron(u, Matrix(f));
    return u;
}

inline Matrix cluster_frame_rotation(const Matrix& rho) {
    if (rho.rows() != 16 || rho.cols() != 16) throw InputError("cluster_frame_rotation: expects a 4-qubit state");
    const Matrix u = cluster_frame_unitary();
    return u * rho * u.adjoint();
}

} // namespace entengine
