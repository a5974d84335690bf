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

#include <array>
#include <string>
#include <vector>

#include "isp/adjoint.hpp"
#include "isp/control.hpp"
#include "isp/objective.hpp"
#include "isp/problem.hpp"

namespace isp {

enum class Block { S = 0, G = 1, F = 2 };

struct SolverConfig {
    double A0 = 1.0;
    double rho = 10.0;
    std::size_t outer_iters = 3;
    std::size_t inner_iters = 200;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double step0 = 1.0;
    double grad_tol = 1e-8;
    double violation_tol = 1e-8;
    FeasibleSet feasible_set = FeasibleSet::VR;
    std::size_t max_backtracks = 40;
    /// Blocks that the optimizer may change (s, g, f).
    std::array<bool, 3> free_blocks{true, true, true};

    /// Throws InvalidArgument if a field is out of range.
    void validate() const;
};

struct IterationRecord {
    std::size_t stage = 0;
    std::size_t iteration = 0;
    CostBreakdown cost;
    double step = 0.0;            ///< accepted alpha (0 for the stage start)
    double grad_norm = 0.0;       ///< sqrt of the pairing norm of the masked gradient
    double violation = 0.0;
    double wall_seconds = 0.0;    ///< since the start of minimize
};

struct StageSummary {
    double A = 0.0;
    std::size_t iterations = 0;
    CostBreakdown cost;
    double violation = 0.0;
    std::string stop_reason;      ///< "grad_tol", "stalled", "inner_iters", "aborted"
};

struct RunRecord {
    std::vector<IterationRecord> iterations;
    std::vector<StageSummary> stages;
    bool converged = false;       ///< final violation <= violation_tol
    std::string status;           ///< "converged", "stages_exhausted", "aborted"
    std::string message;
};

struct MinimizeResult {
    DiscreteControl control;
    RunRecord record;
};

/// Projected gradient descent with Armijo backtracking and penalty
/// continuation A_k = A0 * rho^k. The initial control is projected first.
MinimizeResult minimize(const DiscreteControl& initial, const ProblemData& data, const SolverConfig& cfg);

} // namespace isp
