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
#include <span>
#include <string>
#include <vector>

#include "isp/grid.hpp"
#include "isp/matrix.hpp"
#include "isp/problem.hpp"
#include "isp/quadrature.hpp"

namespace isp {

/// Discrete control ([s]_n, [g]_n, [f]_{nN}) together with the grids it
/// induces. f(k-1, i) holds f_{ik} for cell i and step k.
struct DiscreteControl {
    TimeGrid time;
    SpatialGrid space;
    GridOptions options;
    std::vector<double> s;
    std::vector<double> g;
    Matrix f;

    std::size_t steps() const noexcept { return time.steps(); }
    std::size_t cells() const noexcept { return space.cells(); }
};

/// Builds the grid from s and checks the shapes of g and f.
DiscreteControl make_control(const TimeGrid& time, std::vector<double> s, std::vector<double> g, Matrix f,
                             const GridOptions& options);

/// Re-averages a piecewise-constant source from one spatial grid onto another.
Matrix remap_source(const Matrix& f, const SpatialGrid& from, const SpatialGrid& to);

/// Replaces the boundary samples, rebuilding the grid and remapping f.
DiscreteControl with_boundary(const DiscreteControl& control, std::vector<double> s);

/// Continuous control v = (s, g, f).
struct ContinuousControl {
    Curve s;
    TimeFunction g;
    SpaceTimeFunction f;
};

double norm_b21(std::span<const double> v, double tau);
double norm_b22(std::span<const double> s, double tau);
double norm_l2(const Matrix& f, const TimeGrid& time, const SpatialGrid& space);

/// Inner products whose induced norms are norm_b21 / norm_b22.
double dot_b21(std::span<const double> u, std::span<const double> v, double tau);
double dot_b22(std::span<const double> u, std::span<const double> v, double tau);

struct ControlNorms {
    double s_b22 = 0.0;
    double g_b21 = 0.0;
    double f_l2 = 0.0;
    double max() const noexcept;
};

ControlNorms control_norms(const DiscreteControl& control);

/// Q_n: samples s and g at the nodes (s_0 = s_1 = s(0)) and cell-averages f.
DiscreteControl map_Qn(const ContinuousControl& v, const TimeGrid& time, const GridOptions& options);

/// P_n: piecewise-quadratic s^n, piecewise-linear g^n, piecewise-constant f^n.
ContinuousControl map_Pn(const DiscreteControl& d);

/// s^n(t) and its derivative evaluated from the samples.
double boundary_value(std::span<const double> s, const TimeGrid& time, double t);
double boundary_slope(std::span<const double> s, const TimeGrid& time, double t);
Curve boundary_curve(std::vector<double> s, const TimeGrid& time);

enum class FeasibleSet {
    VR,        ///< delta <= s_k, s_0 = s_1 = s0, norm ball of radius R
    WRCompat,  ///< VR plus g_0 = a(0,0) phi'(0), Stefan compatibility reported
};

struct ProjectionReport {
    std::size_t clamped_low = 0;
    std::size_t clamped_high = 0;
    bool scaled_s = false;
    bool scaled_g = false;
    bool scaled_f = false;
    bool anchor_infeasible = false;
    double stefan_compat_residual = 0.0;  ///< only meaningful for WRCompat
};

struct Projection {
    DiscreteControl control;
    ProjectionReport report;
};

Projection project(const DiscreteControl& d, const ProblemData& data, FeasibleSet set = FeasibleSet::VR);

/// True if project() would leave d unchanged.
bool is_feasible(const DiscreteControl& d, const ProblemData& data, FeasibleSet set = FeasibleSet::VR);

/// Midpoint-rule Gagliardo seminorm [u]_{B_2^order} of uniform samples with
/// the given spacing; pairs closer than one cell are skipped.
double besov_seminorm_diag(std::span<const double> samples, double spacing, double order);

} // namespace isp
