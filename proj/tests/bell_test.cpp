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

#include <random>

#include "entengine/bell.hpp"
#include "entengine/builder.hpp"
#include "test_util.hpp"

namespace entengine {
namespace {

Vector rotated_cluster() {
    Vector v = Vector::Zero(16);
    v(0) = v(3) = v(12) = 0.5;
    v(15) = -0.5;
    return v;
}

Matrix pure(const Vector& v) { return v * v.adjoint(); }

/// Removes the global phase so that the first entry of largest magnitude is real positive.
Matrix2 canonical(const Matrix2& u) {
    Eigen::Index r = 0, c = 0;
    u.cwiseAbs().maxCoeff(&r, &c);
    return u * (std::abs(u(r, c)) / u(r, c));
}

/// The single-qubit Clifford group modulo phase, generated by H and S.
std::vector<Matrix2> clifford_group() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix2 h, p;
    h << s, s, s, -s;
    p << 1, 0, 0, kI;
    std::vector<Matrix2> group{Matrix2::Identity()};
    for (std::size_t i = 0; i < group.size(); ++i) {
        for (const Matrix2& g : {h, p}) {
            const Matrix2 next = canonical(g * group[i]);
            bool seen = false;
            for (const auto& e : group) seen = seen || (e - next).cwiseAbs().maxCoeff() < 1e-12;
            if (!seen) group.push_back(next);
        }
    }
    return group;
}

Vector apply_on_qubit(const Vector& v, const Matrix2& u, int qubit) {
    Vector out = Vector::Zero(16);
    const int shift = 3 - qubit;
    for (int idx = 0; idx < 16; ++idx) {
        const int b = (idx >> shift) & 1;
        for (int b2 = 0; b2 < 2; ++b2) out(idx ^ ((b ^ b2) << shift)) += u(b2, b) * v(idx);
    }
    return out;
}

TEST(Settings, ObservablesMustBeInvolutions) {
    EXPECT_THROW(MeasurementSettings({{pauli::x(), Matrix2(2.0 * pauli::z())}}), InputError);
    Matrix2 nonherm;
    nonherm << 0, 1, 0, 0;
    EXPECT_THROW(MeasurementSettings({{pauli::x(), nonherm}}), InputError);
    EXPECT_THROW(MeasurementSettings({}), InputError);
    EXPECT_THROW(default_mermin_settings(5), InputError);
}

TEST(Mermin, ExactGhzValues) {
    EXPECT_NEAR(mermin_value(pure(ghz_target(2).vector()), default_mermin_settings(2)), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(mermin_value(pure(ghz_target(3).vector()), default_mermin_settings(3)), 2.0, 1e-12);
    EXPECT_GT(mermin_value(pure(ghz_target(4).vector()), default_mermin_settings(4)), kMerminLocalBound);
}

TEST(Mermin, MaximallyMixedStateGivesZero) {
    for (int n = 2; n <= 4; ++n) {
        const Matrix mixed = Matrix::Identity(1 << n, 1 << n) / static_cast<double>(1 << n);
        EXPECT_NEAR(mermin_value(mixed, default_mermin_settings(n)), 0.0, 1e-14);
    }
}

TEST(Mermin, ProductStatesRespectLocalBound) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        Matrix rho = Matrix::Identity(1, 1);
        for (int k = 0; k < 3; ++k) rho = kron(rho, testing::random_density(rng, 2, 1 + trial % 2));
        EXPECT_LE(mermin_value(rho, default_mermin_settings(3)), kMerminLocalBound + 1e-12);
    }
}

TEST(Mermin, BoundedByEndpointsWithinSignPattern) {
    // Dephasing GHZ toward its diagonal keeps every correlator's sign.
    const Matrix g = pure(ghz_target(3).vector());
    const Matrix d = Matrix(g.diagonal().asDiagonal());
    const auto settings = default_mermin_settings(3);
    const double vg = mermin_value(g, settings), vd = mermin_value(d, settings);
    for (double w : {0.1, 0.4, 0.7}) {
        EXPECT_LE(mermin_value(w * g + (1 - w) * d, settings), std::max(vg, vd) + 1e-12);
    }
}

TEST(Correlator, BoundedOnRandomStates) {
    std::mt19937_64 rng(62);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<Matrix2> paulis{pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix rho = testing::random_density(rng, 16, 1 + trial % 4);
        std::vector<Matrix2> ops;
        for (int k = 0; k < 4; ++k) ops.push_back(paulis[static_cast<std::size_t>(pick(rng))]);
        EXPECT_LE(std::abs(correlator(rho, ops)), 1.0 + 1e-12);
    }
}

TEST(Cluster, RotatedStateReachesFour) {
    EXPECT_NEAR(cluster_bell_value(pure(rotated_cluster())), 4.0, 1e-10);
    EXPECT_NEAR(cluster_bell_value(Matrix::Identity(16, 16) / 16.0), 0.0, 1e-14);
    EXPECT_THROW(cluster_bell_value(Matrix::Identity(8, 8) / 8.0), InputError);
}

TEST(Cluster, FrameUnitaryMapsTargetToRotatedForm) {
    const Vector mapped = cluster_frame_unitary() * cluster_target().vector();
    EXPECT_NEAR(std::abs(rotated_cluster().dot(mapped)), 1.0, 1e-10);
    const Matrix rotated = cluster_frame_rotation(pure(cluster_target().vector()));
    EXPECT_NEAR(cluster_bell_value(rotated), 4.0, 1e-10);
    const Matrix u = cluster_frame_unitary();
    EXPECT_LE(max_abs(u * u.adjoint() - Matrix::Identity(16, 16)), 1e-15);
}

TEST(Cluster, CliffordSearchFindsTheHardCodedFrame) {
    const auto group = clifford_group();
    ASSERT_EQ(group.size(), 24U);
    const Vector target = cluster_target().vector();
    const Vector goal = rotated_cluster();
    std::vector<std::array<std::size_t, 4>> hits;
    for (std::size_t a = 0; a < 24; ++a) {
        const Vector va = apply_on_qubit(target, group[a], 0);
        for (std::size_t b = 0; b < 24; ++b) {
            const Vector vb = apply_on_qubit(va, group[b], 1);
            for (std::size_t c = 0; c < 24; ++c) {
                const Vector vc = apply_on_qubit(vb, group[c], 2);
                for (std::size_t d = 0; d < 24; ++d) {
                    if (std::abs(goal.dot(apply_on_qubit(vc, group[d], 3))) > 1.0 - 1e-10) hits.push_back({a, b, c, d});
                }
            }
        }
    }
    ASSERT_FALSE(hits.empty());
    // The hard-coded factors are one of the solutions.
    const auto factors = cluster_frame_factors();
    bool found = false;
    for (const auto& h : hits) {
        bool same = true;
        for (int q = 0; q < 4; ++q) {
            same = same && (group[h[static_cast<std::size_t>(q)]] - canonical(factors[static_cast<std::size_t>(q)]))
                                   .cwiseAbs()
                                   .maxCoeff() < 1e-12;
        }
        found = found || same;
    }
    EXPECT_TRUE(found);
}

} // namespace
} // namespace entengine
