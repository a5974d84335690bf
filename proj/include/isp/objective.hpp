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

#include <functional>
#include <vector>

#include "isp/control.hpp"
#include "isp/forward.hpp"
#include "isp/problem.hpp"

namespace isp {

inline double subplus(double x) noexcept { return x > 0.0 ? x : 0.0; }

struct CostBreakdown {
    double final_misfit = 0.0;     ///< beta0 term
    double boundary_misfit = 0.0;  ///< beta1 term
    double boundary_final = 0.0;   ///< beta2 term
    double penalty = 0.0;          ///< A_k term
    double total = 0.0;
    double A = 0.0;
    double constraint_violation = 0.0;  ///< unweighted penalty sum
};

/// Measurement averages on the current grid: w_i (cell means of w) and
/// mu_k (Steklov means of mu).
struct Measurements {
    std::vector<double> w;
    std::vector<double> mu;
};

Measurements sample_measurements(const TimeGrid& time, const SpatialGrid& space, const ProblemData& data);

/// Discrete cost I_n + P^n_k of a trajectory.
CostBreakdown cost_discrete(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                            double A);
CostBreakdown cost_discrete(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                            const Measurements& meas, double A);

/// sum_k sum_{i < m_k} tau h_i (u_i(k) - u*)_+^2.
double violation_measure(const StateTrajectory& traj, const ProblemData& data);

struct QuadratureOptions {
    std::size_t time_panels = 64;
    std::size_t space_panels = 64;
};

/// Continuous cost J + P_k of an evaluable state u(x, t) under control v.
CostBreakdown cost_continuous(const std::function<double(double, double)>& u, const ContinuousControl& v,
                              const ProblemData& data, double A, const QuadratureOptions& q = {});

} // namespace isp
