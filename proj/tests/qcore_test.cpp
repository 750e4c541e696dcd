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

#include "entengine/qcore.hpp"
#include "test_util.hpp"

namespace entengine {
namespace {

using testing::random_density;
using testing::random_hermitian;
using testing::random_matrix;
using testing::random_unitary;

TEST(Kron, MatchesIndexFormula) {
    std::mt19937_64 rng(1);
    const Matrix a = random_matrix(rng, 2, 3);
    const Matrix b = random_matrix(rng, 3, 2);
    const Matrix k = kron(a, b);
    ASSERT_EQ(k.rows(), 6);
    ASSERT_EQ(k.cols(), 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 2; ++q) EXPECT_EQ(k(i * 3 + p, j * 2 + q), a(i, j) * b(p, q));
}

TEST(Kron, SparseAgreesWithDense) {
    std::mt19937_64 rng(2);
    const Matrix a = random_matrix(rng, 3, 3);
    const Matrix b = random_matrix(rng, 2, 2);
    const SparseMatrix s = kron(SparseMatrix(a.sparseView()), SparseMatrix(b.sparseView()));
    EXPECT_LE(max_abs(Matrix(s) - kron(a, b)), 1e-15);
}

TEST(Kron, MixedProductProperty) {
    std::mt19937_64 rng(3);
    const Matrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 3, 3);
    const Matrix c = random_matrix(rng, 2, 2), d = random_matrix(rng, 3, 3);
    EXPECT_LE(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
}

TEST(Indexing, DigitsAreBigEndianMixedRadix) {
    const std::vector<int> dims{2, 3, 2};
    EXPECT_EQ(total_dim(dims), 12U);
    for (std::size_t idx = 0; idx < 12; ++idx) {
        const auto d = index_digits(idx, dims);
        EXPECT_EQ(static_cast<std::size_t>(d[0] * 6 + d[1] * 2 + d[2]), idx);
        EXPECT_EQ(digits_index(d, dims), idx);
    }
    EXPECT_EQ(site_stride(dims, 0), 6U);
    EXPECT_EQ(site_stride(dims, 2), 1U);
}

TEST(PartialTrace, MatchesExplicitSummation) {
    std::mt19937_64 rng(4);
    const std::vector<int> dims{2, 3, 2};
    const Matrix m = random_matrix(rng, 12, 12);
    for (std::size_t site = 0; site < dims.size(); ++site) {
        std::vector<int> rest = dims;
        rest.erase(rest.begin() + static_cast<long>(site));
        const Matrix got = partial_trace(m, dims, site);
        ASSERT_EQ(static_cast<std::size_t>(got.rows()), total_dim(rest));
        for (std::size_t a = 0; a < total_dim(rest); ++a) {
            for (std::size_t b = 0; b < total_dim(rest); ++b) {
                cplx expected = 0.0;
                for (int k = 0; k < dims[site]; ++k) {
                    auto da = index_digits(a, rest), db = index_digits(b, rest);
                    da.insert(da.begin() + static_cast<long>(site), k);
                    db.insert(db.begin() + static_cast<long>(site), k);
                    expected += m(static_cast<Eigen::Index>(digits_index(da, dims)),
                                  static_cast<Eigen::Index>(digits_index(db, dims)));
                }
                EXPECT_NEAR(std::abs(got(a, b) - expected), 0.0, 1e-12);
            }
        }
    }
}

TEST(PartialTrace, RecoversProductFactors) {
    std::mt19937_64 rng(5);
    const Matrix a = random_density(rng, 3, 2), b = random_density(rng, 2, 1), c = random_density(rng, 3, 3);
    const std::vector<int> dims{3, 2, 3};
    const Matrix abc = kron(kron(a, b), c);
    EXPECT_LE(max_abs(partial_trace(abc, dims, 0) - kron(b, c)), 1e-13);
    EXPECT_LE(max_abs(partial_trace(abc, dims, 1) - kron(a, c)), 1e-13);
    EXPECT_LE(max_abs(partial_trace(abc, dims, 2) - kron(a, b)), 1e-13);
}

TEST(PartialTrace, PreservesTraceForRandomStates) {
    std::mt19937_64 rng(6);
    const std::vector<int> dims{3, 3, 2};
    for (int trial = 0; trial < 20; ++trial) {
        const DensityOperator rho(random_density(rng, 18, 1 + trial % 4), dims);
        for (std::size_t s = 0; s < 3; ++s) {
            const auto red = partial_trace(rho, s);
            EXPECT_TRUE(red.validate().ok);
            EXPECT_EQ(red.num_sites(), 2U);
        }
    }
}

TEST(TensorAt, InsertsFactorAtSite) {
    std::mt19937_64 rng(7);
    const Matrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 2, 2), c = random_matrix(rng, 3, 3);
    const std::vector<int> dims{3, 2, 3};
    EXPECT_LE(max_abs(tensor_at(a, kron(b, c), dims, 0) - kron(kron(a, b), c)), 1e-13);
    EXPECT_LE(max_abs(tensor_at(b, kron(a, c), dims, 1) - kron(kron(a, b), c)), 1e-13);
    EXPECT_LE(max_abs(tensor_at(c, kron(a, b), dims, 2) - kron(kron(a, b), c)), 1e-13);
}

TEST(LocalOperator, EqualsKronWithIdentities) {
    std::mt19937_64 rng(8);
    const Matrix op = random_matrix(rng, 3, 3);
    const std::vector<int> dims{2, 3, 3};
    const Matrix expected = kron(kron(Matrix::Identity(2, 2), op), Matrix::Identity(3, 3));
    EXPECT_LE(max_abs(Matrix(local_operator(op, dims, 1)) - expected), 1e-15);
}

TEST(Vectorize, ColumnStackingIdentity) {
    // vec(A X B) = (B^T (x) A) vec(X)
    std::mt19937_64 rng(9);
    const Matrix a = random_matrix(rng, 4, 4), x = random_matrix(rng, 4, 4), b = random_matrix(rng, 4, 4);
    const Vector lhs = vectorize(a * x * b);
    const Vector rhs = kron(Matrix(b.transpose()), a) * vectorize(x);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(max_abs(devectorize(vectorize(x), 4) - x), 0.0);
    EXPECT_EQ(vectorize(x)(1), x(1, 0));
}

TEST(MinEigenvalue, RecoversConstructedSpectrum) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd ev(6);
        ev << -0.3 + 0.1 * trial, 0.5, 1.0, 2.0, 3.0, 4.0;
        const Matrix u = random_unitary(rng, 6);
        const Matrix m = u * ev.cast<cplx>().asDiagonal() * u.adjoint();
        EXPECT_NEAR(min_eigenvalue(m), ev.minCoeff(), 1e-10);
    }
}

TEST(MinEigenvalue, RejectsNonHermitian) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(min_eigenvalue(m), InputError);
}

TEST(DensityOperator, AcceptsValidStates) {
    std::mt19937_64 rng(11);
    const DensityOperator rho(random_density(rng, 9, 3), {3, 3});
    EXPECT_EQ(rho.dim(), 9U);
    EXPECT_EQ(rho.num_sites(), 2U);
    EXPECT_LE(rho.purity(), 1.0 + 1e-12);
    const DensityOperator pure(random_density(rng, 4, 1), {2, 2});
    EXPECT_NEAR(pure.purity(), 1.0, 1e-12);
    const DensityOperator mixed(Matrix::Identity(6, 6) / 6.0, {2, 3});
    EXPECT_NEAR(mixed.purity(), 1.0 / 6.0, 1e-15);
}

TEST(DensityOperator, RejectsInvalidStates) {
    std::mt19937_64 rng(12);
    Matrix good = random_density(rng, 4, 2);
    Matrix non_herm = good;
    non_herm(0, 1) += 0.1;
    EXPECT_THROW(DensityOperator(non_herm, {2, 2}), InputError);
    EXPECT_THROW(DensityOperator(good * 1.1, {2, 2}), InputError);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    EXPECT_THROW(DensityOperator(negative, {2}), InputError);
    EXPECT_THROW(DensityOperator(good, {2, 3}), InputError);
    EXPECT_THROW(DensityOperator(good, {4}), InputError);
    Matrix nan = good;
    nan(0, 0) = std::nan("");
    EXPECT_THROW(DensityOperator(nan, {2, 2}), InputError);
}

TEST(CheckDensity, ReportsReason) {
    Matrix m = Matrix::Identity(2, 2);
    const auto r = check_density(m, std::vector<int>{2});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.reason, "trace differs from 1");
    EXPECT_NEAR(r.trace_error, 1.0, 1e-15);
}

TEST(Tensor, ConcatenatesSiteDims) {
    const DensityOperator a(Matrix::Identity(2, 2) / 2.0, {2});
    const DensityOperator b(Matrix::Identity(3, 3) / 3.0, {3});
    const auto ab = tensor(a, b);
    EXPECT_EQ(ab.site_dims(), (std::vector<int>{2, 3}));
    EXPECT_TRUE(ab.validate().ok);
}

TEST(HermiticityPreservation, UnitaryConjugationKeepsValidity) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix rho = random_density(rng, 9, 1 + trial % 9);
        const Matrix u = random_unitary(rng, 9);
        const Matrix h = random_hermitian(rng, 9);
        EXPECT_TRUE(check_density(u * rho * u.adjoint(), std::vector<int>{3, 3}).ok);
        EXPECT_LE(hermiticity_error(u * h * u.adjoint()), 1e-12);
    }
}

} // namespace
} // namespace entengine
