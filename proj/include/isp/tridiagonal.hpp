// Copyright 2026 The ISP Solver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

namespace isp {

/// Row i reads sub[i] x_{i-1} + diag[i] x_i + sup[i] x_{i+1} = rhs[i].
/// scale[i] records the factor between row i and the corresponding row of
/// the unscaled summation identity (row = scale * identity row).
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> sup;
    std::vector<double> rhs;
    std::vector<double> scale;

    explicit TridiagonalSystem(std::size_t size = 0)
        : sub(size, 0.0), diag(size, 0.0), sup(size, 0.0), rhs(size, 0.0), scale(size, 1.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// Weak row diagonal dominance |d_i| >= |l_i| + |u_i| for all rows.
    bool diagonally_dominant() const noexcept;

    /// A x.
    std::vector<double> apply(const std::vector<double>& x) const;
};

struct TridiagonalSolution {
    std::vector<double> x;
    double residual = 0.0;   ///< ||A x - b||_inf
};

/// Thomas elimination without pivoting, followed by one step of iterative
/// refinement. Throws SingularStepError(level)
/// on a vanishing pivot or when the residual exceeds 1e-10 (1 + ||b||_inf).
TridiagonalSolution solve_tridiagonal(const TridiagonalSystem& sys, std::size_t level = 0);

} // namespace isp
