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

#include "isp/tridiagonal.hpp"

#include <algorithm>
#include <cmath>

#include "isp/error.hpp"

namespace isp {

bool TridiagonalSystem::diagonally_dominant() const noexcept {
    for (std::size_t i = 0; i < size(); ++i) {
        if (std::abs(diag[i]) < std::abs(sub[i]) + std::abs(sup[i])) return false;
    }
    return true;
}

std::vector<double> TridiagonalSystem::apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag[i] * x[i];
        if (i > 0) acc += sub[i] * x[i - 1];
        if (i + 1 < n) acc += sup[i] * x[i + 1];
        y[i] = acc;
    }
    return y;
}

TridiagonalSolution solve_tridiagonal(const TridiagonalSystem& sys, std::size_t level) {
    const std::size_t n = sys.size();
    if (n == 0) throw InvalidArgument("tridiagonal solve: empty system");
    std::vector<double> cp(n, 0.0);
    std::vector<double> piv(n, 0.0);
    auto pivot_check = [&](double pivot, double ref, std::size_t row) {
        if (!std::isfinite(pivot) || std::abs(pivot) <= 1e-14 * ref) {
            throw SingularStepError(level, "zero pivot in row " + std::to_string(row));
        }
    };
    pivot_check(sys.diag[0], std::abs(sys.diag[0]) + std::abs(sys.sup[0]), 0);
    piv[0] = sys.diag[0];
    cp[0] = n > 1 ? sys.sup[0] / piv[0] : 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double pivot = sys.diag[i] - sys.sub[i] * cp[i - 1];
        const double ref = std::abs(sys.diag[i]) + std::abs(sys.sub[i] * cp[i - 1]);
        pivot_check(pivot, ref, i);
        piv[i] = pivot;
        cp[i] = i + 1 < n ? sys.sup[i] / pivot : 0.0;
    }
    // Forward and back substitution with the stored factors.
    auto substitute = [&](std::vector<double> r) {
        r[0] /= piv[0];
        for (std::size_t i = 1; i < n; ++i) r[i] = (r[i] - sys.sub[i] * r[i - 1]) / piv[i];
        for (std::size_t i = n - 1; i-- > 0;) r[i] -= cp[i] * r[i + 1];
        return r;
    };
    TridiagonalSolution sol;
    sol.x = substitute(sys.rhs);

    // One step of iterative refinement with an extended-precision residual.
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = static_cast<long double>(sys.rhs[i]) - static_cast<long double>(sys.diag[i]) * sol.x[i];
        if (i > 0) acc -= static_cast<long double>(sys.sub[i]) * sol.x[i - 1];
        if (i + 1 < n) acc -= static_cast<long double>(sys.sup[i]) * sol.x[i + 1];
        r[i] = static_cast<double>(acc);
    }
    const std::vector<double> dx = substitute(r);
    for (std::size_t i = 0; i < n; ++i) sol.x[i] += dx[i];

    const std::vector<double> ax = sys.apply(sol.x);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sol.residual = std::max(sol.residual, std::abs(ax[i] - sys.rhs[i]));
        bnorm = std::max(bnorm, std::abs(sys.rhs[i]));
    }
    if (!(sol.residual <= 1e-10 * (1.0 + bnorm))) {
        throw SingularStepError(level, "tridiagonal residual " + std::to_string(sol.residual) + " too large");
    }
    return sol;
}

} // namespace isp
