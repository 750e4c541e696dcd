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

// Dense/sparse complex linear algebra on mixed qubit/qutrit tensor spaces.
//
// Index convention: site 0 is the leftmost (most significant) tensor
// factor and a composite basis index is big-endian mixed-radix over the
// site dimensions. Operators are vectorized by column stacking, so that
// vec(A X B) = (B^T (x) A) vec(X).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "entengine/errors.hpp"

namespace entengine {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, long>;
using Triplet = Eigen::Triplet<cplx, long>;

inline constexpr cplx kI{0.0, 1.0};

/// Numerical acceptance thresholds shared by every validity check.
struct Tolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double psd = -1e-8;  ///< smallest admissible eigenvalue
    double residual = 1e-9;
    double commutator = 1e-10;
    double herald_floor = 1e-12;
    /// Steady state is accepted as unique when sigma_1 <= null_rel * ||L||
    /// and sigma_2 > gap_rel * ||L||.
    double null_rel = 1e-10;
    double gap_rel = 1e-13;
};

inline std::size_t total_dim(std::span<const int> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
}

/// Mixed-radix digits of `index`, most significant site first.
inline std::vector<int> index_digits(std::size_t index, std::span<const int> dims) {
    std::vector<int> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = static_cast<int>(index % static_cast<std::size_t>(dims[k]));
        index /= static_cast<std::size_t>(dims[k]);
    }
    return digits;
}

inline std::size_t digits_index(std::span<const int> digits, std::span<const int> dims) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        index = index * static_cast<std::size_t>(dims[k]) + static_cast<std::size_t>(digits[k]);
    }
    return index;
}

/// Stride of site `k` in the composite index.
inline std::size_t site_stride(std::span<const int> dims, std::size_t k) {
    std::size_t stride = 1;
    for (std::size_t j = k + 1; j < dims.size(); ++j) stride *= static_cast<std::size_t>(dims[j]);
    return stride;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const Eigen::Index p = b.rows();
    const Eigen::Index q = b.cols();
    Matrix out(a.rows() * p, a.cols() * q);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * p, j * q, p, q) = a(i, j) * b;
        }
    }
    return out;
}

inline SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (long ja = 0; ja < a.outerSize(); ++ja) {
        for (SparseMatrix::InnerIterator ita(a, ja); ita; ++ita) {
            for (long jb = 0; jb < b.outerSize(); ++jb) {
                for (SparseMatrix::InnerIterator itb(b, jb); itb; ++itb) {
                    trips.emplace_back(ita.row() * b.rows() + itb.row(), ita.col() * b.cols() + itb.col(),
                                       ita.value() * itb.value());
                }
            }
        }
    }
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Smallest eigenvalue of a Hermitian matrix.
inline double min_eigenvalue(const Matrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols()) throw InputError("min_eigenvalue: matrix is not square");
    if (hermiticity_error(m) > tol * std::max(1.0, max_abs(m))) {
        throw InputError("min_eigenvalue: matrix is not Hermitian");
    }
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

struct ValidityReport {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    bool dims_consistent = false;
    bool finite = false;
    bool ok = false;
    std::string reason;
};

inline ValidityReport check_density(const Matrix& m, std::span<const int> dims, const Tolerances& tol = {}) {
    ValidityReport r;
    r.finite = all_finite(m);
    r.dims_consistent = m.rows() == m.cols() && static_cast<std::size_t>(m.rows()) == total_dim(dims);
    for (int d : dims) {
        if (d != 2 && d != 3) r.dims_consistent = false;
    }
    if (!r.finite) {
        r.reason = "non-finite entries";
        return r;
    }
    if (!r.dims_consistent) {
        r.reason = "site dimensions do not match the matrix";
        return r;
    }
    r.hermiticity_error = hermiticity_error(m);
    r.trace_error = std::abs(m.trace() - cplx{1.0, 0.0});
    if (r.hermiticity_error > tol.hermiticity) {
        r.reason = "not Hermitian";
        return r;
    }
    r.min_eigenvalue = min_eigenvalue(m, 1.0);
    if (r.trace_error > tol.trace) {
        r.reason = "trace differs from 1";
    } else if (r.min_eigenvalue < tol.psd) {
        r.reason = "not positive semidefinite";
    } else {
        r.ok = true;
    }
    return r;
}

/// Hermitian, unit-trace, PSD operator on a product of qubits/qutrits.
class DensityOperator {
public:
    DensityOperator(Matrix m, std::vector<int> site_dims, const Tolerances& tol = {})
        : matrix_(std::move(m)), dims_(std::move(site_dims)) {
        const auto report = check_density(matrix_, dims_, tol);
        if (!report.ok) throw InputError("invalid density operator: " + report.reason);
    }

    /// Skips validation; for intermediate results whose validity is checked later.
    static DensityOperator unchecked(Matrix m, std::vector<int> site_dims) {
        return DensityOperator(std::move(m), std::move(site_dims), Unchecked{});
    }

    const Matrix& matrix() const noexcept { return matrix_; }
    const std::vector<int>& site_dims() const noexcept { return dims_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t num_sites() const noexcept { return dims_.size(); }

    double purity() const { return (matrix_ * matrix_).trace().real(); }
    ValidityReport validate(const Tolerances& tol = {}) const { return check_density(matrix_, dims_, tol); }

private:
    struct Unchecked {};
    DensityOperator(Matrix m, std::vector<int> dims, Unchecked) : matrix_(std::move(m)), dims_(std::move(dims)) {}

    Matrix matrix_;
    std::vector<int> dims_;
};

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    std::vector<int> dims = a.site_dims();
    dims.insert(dims.end(), b.site_dims().begin(), b.site_dims().end());
    return DensityOperator::unchecked(kron(a.matrix(), b.matrix()), std::move(dims));
}

/// Trace out `site` of an operator on the product space `dims`.
inline Matrix partial_trace(const Matrix& m, std::span<const int> dims, std::size_t site) {
    if (site >= dims.size()) throw InputError("partial_trace: site out of range");
    const std::size_t d = static_cast<std::size_t>(dims[site]);
    const std::size_t inner = site_stride(dims, site);
    const std::size_t outer = total_dim(dims) / (d * inner);
    const std::size_t reduced = outer * inner;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(reduced), static_cast<Eigen::Index>(reduced));
    for (std::size_t oi = 0; oi < outer; ++oi) {
        for (std::size_t ii = 0; ii < inner; ++ii) {
            for (std::size_t oj = 0; oj < outer; ++oj) {
                for (std::size_t ij = 0; ij < inner; ++ij) {
                    cplx acc = 0.0;
                    for (std::size_t m_ = 0; m_ < d; ++m_) {
                        acc += m((oi * d + m_) * inner + ii, (oj * d + m_) * inner + ij);
                    }
                    out(oi * inner + ii, oj * inner + ij) = acc;
                }
            }
        }
    }
    return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::size_t site) {
    if (site >= rho.num_sites()) throw InputError("partial_trace: site out of range");
    std::vector<int> dims = rho.site_dims();
    Matrix reduced = partial_trace(rho.matrix(), dims, site);
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(site));
    return DensityOperator::unchecked(std::move(reduced), std::move(dims));
}

/// Inserts `local` as the factor at `site`: result = rest with `local` tensored in at that position.
/// `dims` describes the full space (including `site`).
inline Matrix tensor_at(const Matrix& local, const Matrix& rest, std::span<const int> dims, std::size_t site) {
    if (site >= dims.size()) throw InputError("tensor_at: site out of range");
    const std::size_t d = static_cast<std::size_t>(dims[site]);
    const std::size_t inner = site_stride(dims, site);
    const std::size_t outer = total_dim(dims) / (d * inner);
    if (static_cast<std::size_t>(local.rows()) != d || static_cast<std::size_t>(rest.rows()) != outer * inner) {
        throw InputError("tensor_at: dimension mismatch");
    }
    const auto n = static_cast<Eigen::Index>(total_dim(dims));
    Matrix out(n, n);
    for (std::size_t oi = 0; oi < outer; ++oi)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t ii = 0; ii < inner; ++ii)
                for (std::size_t oj = 0; oj < outer; ++oj)
                    for (std::size_t b = 0; b < d; ++b)
                        for (std::size_t ij = 0; ij < inner; ++ij)
                            out((oi * d + a) * inner + ii, (oj * d + b) * inner + ij) =
                                local(a, b) * rest(oi * inner + ii, oj * inner + ij);
    return out;
}

/// Embeds a single-site operator into the full space as I (x) ... (x) op (x) ... (x) I.
inline SparseMatrix local_operator(const Matrix& op, std::span<const int> dims, std::size_t site) {
    const std::size_t d = static_cast<std::size_t>(dims[site]);
    const std::size_t inner = site_stride(dims, site);
    const std::size_t outer = total_dim(dims) / (d * inner);
    std::vector<Triplet> trips;
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                const cplx v = op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (v == cplx{}) continue;
                for (std::size_t i = 0; i < inner; ++i) {
                    trips.emplace_back(static_cast<long>((o * d + a) * inner + i),
                                       static_cast<long>((o * d + b) * inner + i), v);
                }
            }
    const auto n = static_cast<long>(total_dim(dims));
    SparseMatrix out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline Vector vectorize(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix devectorize(const Vector& v, std::size_t dim) {
    if (static_cast<std::size_t>(v.size()) != dim * dim) throw InputError("devectorize: dimension mismatch");
    const auto d = static_cast<Eigen::Index>(dim);
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline Matrix projector(const Vector& psi) { return psi * psi.adjoint(); }

} // namespace entengine
