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

#include <vector>

#include "isp/control.hpp"
#include "isp/forward.hpp"
#include "isp/matrix.hpp"
#include "isp/objective.hpp"
#include "isp/problem.hpp"

namespace isp {

/// Adjoint state on the forward grid. Row n is the terminal condition; row
/// k-1 (k = 1..n) is the solution of the backward step over (t_{k-1}, t_k],
/// active on nodes 0..m_{j_k} and reflection-extended beyond.
struct AdjointTrajectory {
    TimeGrid time;
    SpatialGrid space;
    Matrix psi;
    Matrix source;                    ///< -2 A (u_i(k) - u*)_+, row k
    std::vector<std::size_t> active;  ///< active node count of each row
    double max_residual = 0.0;
};

/// Assembles the backward step that produces row k-1 from row k.
TridiagonalSystem assemble_adjoint_step(std::size_t k, std::span<const double> next, const StateTrajectory& traj,
                                        const DiscreteControl& control, const ProblemData& data,
                                        const Measurements& meas, double A);

AdjointTrajectory adjoint_solve(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                                double A);

/// Riesz representer of the cost differential for the pairing
///   <G, dv> = sum_k tau d_s[k] ds[k] + sum_k tau d_g[k] dg[k]
///           + sum_k sum_i tau h_i d_f(k-1, i) df(k-1, i).
struct GradientVector {
    std::vector<double> d_s;
    std::vector<double> d_g;
    Matrix d_f;
};

/// A variation of a discrete control, laid out on that control's grid.
struct ControlDirection {
    std::vector<double> ds;
    std::vector<double> dg;
    Matrix df;
};

ControlDirection zero_direction(const DiscreteControl& control);

double pairing(const GradientVector& grad, const ControlDirection& dir, const DiscreteControl& control);

/// Squared norm of the gradient in the pairing metric.
double gradient_norm2(const GradientVector& grad, const DiscreteControl& control);

GradientVector assemble_gradient(const StateTrajectory& traj, const AdjointTrajectory& adj,
                                 const DiscreteControl& control, const ProblemData& data, double A);

/// Forward + adjoint + gradient in one call.
struct Evaluation {
    StateTrajectory state;
    CostBreakdown cost;
    AdjointTrajectory adjoint;
    GradientVector gradient;
};

Evaluation evaluate_with_gradient(const DiscreteControl& control, const ProblemData& data, double A);

/// control + eps * dir, rebuilding the grid when s moves.
DiscreteControl perturb(const DiscreteControl& control, const ControlDirection& dir, double eps);

struct FdPairing {
    double value = 0.0;
    bool topology_changed = false;  ///< the +/- eps grids differ in cell count
};

/// Central differences (I(v + eps d) - I(v - eps d)) / (2 eps) of the discrete cost.
std::vector<FdPairing> fd_gradient_oracle(const DiscreteControl& control, const ProblemData& data, double A,
                                          double eps, const std::vector<ControlDirection>& directions);

struct OptimalityReport {
    std::vector<double> pairings;   ///< <G, v_c - v> per candidate
    double min_pairing = 0.0;
    bool optimal = true;            ///< no pairing below -tol
};

OptimalityReport check_optimality(const GradientVector& grad, const DiscreteControl& control,
                                  const std::vector<DiscreteControl>& candidates, double tol = 1e-6);

} // namespace isp
