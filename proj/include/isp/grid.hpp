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

/// Uniform grid t_k = k * tau on [0, T].
class TimeGrid {
public:
    TimeGrid() = default;

    std::size_t steps() const noexcept { return n_; }
    double final_time() const noexcept { return T_; }
    double tau() const noexcept { return tau_; }
    double node(std::size_t k) const noexcept { return k == n_ ? T_ : static_cast<double>(k) * tau_; }
    std::vector<double> nodes() const;

    /// Index k of the step (t_{k-1}, t_k] containing t; t <= 0 maps to 1, t >= T to n.
    std::size_t step_containing(double t) const noexcept;

    friend TimeGrid build_time_grid(double T, std::size_t n);

private:
    std::size_t n_ = 0;
    double T_ = 0.0;
    double tau_ = 0.0;
};

TimeGrid build_time_grid(double T, std::size_t n);

struct GridOptions {
    std::size_t m0 = 8;       ///< subintervals on [0, min_k s_k]
    double ell = 1.0;         ///< right end of the computational domain D
    double delta = 0.0;       ///< lower bound for boundary samples
    double coupling = 2.0;    ///< C_g in max_i h_i <= C_g * sqrt(tau)
};

/// Spatial grid following the free boundary samples: a uniform block on
/// [0, s_{p_0}], one uniformly subdivided segment per new sorted boundary
/// level, and a coarse block on [s_{p_n}, ell]. Immutable once built.
class SpatialGrid {
public:
    SpatialGrid() = default;

    /// Number of cells N (nodes are x_0 .. x_N).
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double x(std::size_t i) const noexcept { return nodes_[i]; }
    double step(std::size_t i) const noexcept { return nodes_[i + 1] - nodes_[i]; }
    double ell() const noexcept { return nodes_.back(); }

    double base_step() const noexcept { return h_; }
    double coarse_step() const noexcept { return h_bar_; }
    double max_step() const noexcept { return max_step_; }

    /// Permutation sorting the boundary samples ascending (stable).
    const std::vector<std::size_t>& permutation() const noexcept { return perm_; }
    /// m_{j_k}: node index of the boundary at time level k.
    std::size_t active(std::size_t k) const noexcept { return active_[k]; }
    const std::vector<std::size_t>& active_counts() const noexcept { return active_; }
    /// m_j for each sorted position j = 0..n.
    const std::vector<std::size_t>& level_counts() const noexcept { return sorted_m_; }

    /// Cell i with x_i <= x < x_{i+1}; the right end maps to the last cell.
    std::size_t cell_containing(double x) const noexcept;

    bool same_nodes(const SpatialGrid& other) const noexcept { return nodes_ == other.nodes_; }

    friend SpatialGrid build_spatial_grid(const std::vector<double>& s, const GridOptions& opts,
                                          const TimeGrid& time);

private:
    std::vector<double> nodes_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> sorted_m_;
    std::vector<std::size_t> active_;
    double h_ = 0.0;
    double h_bar_ = 0.0;
    double max_step_ = 0.0;
};

/// Builds the free-boundary grid for samples s (length n+1).
/// Throws ConstraintViolation if some s_k < delta and GridCouplingViolation
/// if the largest step exceeds coupling * sqrt(tau).
SpatialGrid build_spatial_grid(const std::vector<double>& s, const GridOptions& opts, const TimeGrid& time);

struct Reflection {
    double point = 0.0;
    std::size_t iterations = 0;
};

/// Folds x >= s back into [0, s] by repeated x -> 2^m s - x.
Reflection reflect(double x, double s);

inline double reflect_index(double x, double s) { return reflect(x, s).point; }

/// Upper bound 1 + ceil(log2(ell / delta)) on the number of folds.
std::size_t max_reflections(double ell, double delta);

} // namespace isp
