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

// Phase-one simplex for small dense feasibility problems
//
//     find x >= 0  such that  A x = b.
//
// Bland's rule is used for both the entering and the leaving variable, so
// the method terminates on degenerate problems. Intended for the handful of
// equality constraints produced by energy-conservation conditions; the
// tableau is dense.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "entengine/errors.hpp"

namespace entengine::lp {

struct FeasibilityResult {
    bool feasible = false;
    Eigen::VectorXd x;      ///< a feasible point when `feasible`
    double infeasibility;   ///< optimal sum of artificial variables
    int pivots = 0;
};

inline FeasibilityResult find_feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                             double tol = 1e-9) {
    if (a.rows() != b.size()) throw InputError("lp: constraint matrix and rhs disagree");
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    FeasibilityResult result;
    result.x = Eigen::VectorXd::Zero(n);
    result.infeasibility = 0.0;
    if (m == 0) {
        result.feasible = true;
        return result;
    }

    // Tableau columns: n structural, m artificial, 1 rhs. Last row holds reduced costs.
    const Eigen::Index cols = n + m + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a.row(i);
        t(i, n + i) = 1.0;
        t(i, cols - 1) = sign * b(i);
        basis[static_cast<std::size_t>(i)] = n + i;
    }
    for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

    const double scale = std::max(1.0, t.col(cols - 1).head(m).cwiseAbs().maxCoeff());
    const int max_pivots = 50 * static_cast<int>(n + m) + 100;
    while (result.pivots < max_pivots) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j) {
            if (t(m, j) < -tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) > tol) {
                const double ratio = t(i, cols - 1) / t(i, enter);
                if (ratio < best - tol ||
                    (std::abs(ratio - best) <= tol && leave >= 0 &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        // The phase-one objective is bounded below by zero, so a column with
        // no positive entry can only appear through round-off.
        if (leave < 0) break;

        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
        ++result.pivots;
    }

    result.infeasibility = -t(m, cols - 1);
    result.feasible = result.infeasibility <= tol * scale;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index v = basis[static_cast<std::size_t>(i)];
        if (v < n) result.x(v) = std::max(0.0, t(i, cols - 1));
    }
    return result;
}

} // namespace entengine::lp
