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
#include <memory>
#include <span>
#include <vector>

#include "isp/control.hpp"
#include "isp/matrix.hpp"
#include "isp/problem.hpp"
#include "isp/tridiagonal.hpp"

namespace isp {

/// Steklov averages feeding the difference scheme. Index k-1 holds step k.
struct SchemeCoefficients {
    Matrix a;                    ///< a_{ik}, n x N
    Matrix b;                    ///< b_{ik}
    Matrix c;                    ///< c_{ik}
    std::vector<double> flux;    ///< g^n_k
    std::vector<double> latent;  ///< (gamma_{s^n} (s^n)')^k
    std::vector<double> chi;     ///< chi^k_{s^n}
};

SchemeCoefficients compute_coefficients(const DiscreteControl& control, const ProblemData& data);

/// Linear system for u(k) on the active nodes 0..m_{j_k}. prev is u(k-1)
/// on all N+1 nodes (already extended past the boundary).
TridiagonalSystem assemble_step(std::size_t k, std::span<const double> prev, const DiscreteControl& control,
                                const SchemeCoefficients& coeffs);
TridiagonalSystem assemble_step(std::size_t k, std::span<const double> prev, const DiscreteControl& control,
                                const ProblemData& data);

/// Solves one step; alias of solve_tridiagonal kept for symmetry with assemble_step.
std::vector<double> solve_step(const TridiagonalSystem& sys, std::size_t level = 0);

/// Fills nodes i > m of row with the reflection-extended piecewise-linear
/// interpolant of the active values u_0..u_m (x_m = boundary).
void extend_by_reflection(std::span<double> row, const SpatialGrid& space, std::size_t m);

/// Discrete state vector u_i(k), k = 0..n, i = 0..N.
struct StateTrajectory {
    TimeGrid time;
    SpatialGrid space;
    std::vector<double> s;
    Matrix u;
    std::shared_ptr<const SchemeCoefficients> coeffs;
    double max_residual = 0.0;

    std::size_t active(std::size_t k) const noexcept { return space.active(k); }
    /// û(x; k): piecewise-linear interpolant of the active values, folded for x > s_k.
    double hat(double x, std::size_t k) const;
};

StateTrajectory forward_solve(const DiscreteControl& control, const ProblemData& data);

/// The three interpolants of a trajectory: piecewise constant in t (u^tau),
/// piecewise linear in t (û^tau) and piecewise constant in both (ũ^tau).
/// Evaluating outside D throws DomainError (û^tau accepts t > T).
struct Interpolants {
    std::function<double(double, double)> u_tau;
    std::function<double(double, double)> u_hat_tau;
    std::function<double(double, double)> u_tilde_tau;
};

Interpolants interpolants(std::shared_ptr<const StateTrajectory> traj);

struct EnergyReport {
    // First energy estimate.
    double mass_max = 0.0;          ///< max_k sum h_i u_i(k)^2
    double dissipation = 0.0;       ///< sum_k tau sum h_i u_ix(k)^2
    double lhs = 0.0;
    double phi_norm2 = 0.0;
    double g_norm2 = 0.0;
    double f_norm2 = 0.0;
    double latent_norm2 = 0.0;
    double chi_norm2 = 0.0;
    double growth_term = 0.0;       ///< boundary-growth sum over Ind_+(s_{k+1} - s_k)
    double rhs = 0.0;
    double ratio = 0.0;             ///< lhs / rhs
    // Second energy estimate (left-hand side terms only).
    double see_gradient_max = 0.0;
    double see_time_sum = 0.0;
    double see_mixed_sum = 0.0;
};

EnergyReport energy_diagnostics(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data);

} // namespace isp
