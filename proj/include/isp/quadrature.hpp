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
#include <cstddef>
#include <functional>

#include "isp/field.hpp"
#include "isp/grid.hpp"

namespace isp {

namespace quad {

// 4-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree <= 7.
inline constexpr std::array<double, 4> kNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
inline constexpr std::array<double, 4> kWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                0.3478548451374538};

/// Composite 4-point Gauss-Legendre integral of f over [a, b].
template <typename F>
double integrate(F&& f, double a, double b, std::size_t panels = 1) {
    const double width = (b - a) / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + static_cast<double>(p) * width;
        const double mid = lo + 0.5 * width;
        double part = 0.0;
        for (std::size_t q = 0; q < kNodes.size(); ++q) part += kWeights[q] * f(mid + 0.5 * width * kNodes[q]);
        acc += 0.5 * width * part;
    }
    return acc;
}

/// Tensor-product composite rule over [xa, xb] x [ta, tb].
template <typename F>
double integrate2(F&& f, double xa, double xb, double ta, double tb, std::size_t px = 1, std::size_t pt = 1) {
    return integrate([&](double t) { return integrate([&](double x) { return f(x, t); }, xa, xb, px); }, ta, tb, pt);
}

} // namespace quad

using TimeFunction = std::function<double(double)>;
using SpaceTimeFunction = std::function<double(double, double)>;

/// r_k = (1/tau) * integral of r over [t_{k-1}, t_k], k = 1..n.
double steklov_time_avg(const TimeFunction& r, std::size_t k, const TimeGrid& time);

/// d_{ik}: mean of d over [x_i, x_{i+1}] x [t_{k-1}, t_k].
double steklov_cell_avg(const SpaceTimeFunction& d, std::size_t i, std::size_t k, const TimeGrid& time,
                        const SpatialGrid& space);
double steklov_cell_avg(const Field& d, std::size_t i, std::size_t k, const TimeGrid& time,
                        const SpatialGrid& space);

/// w_i: mean of w(x) (sampled at t = T) over cell i.
double cell_avg(const Field& w, std::size_t i, const SpatialGrid& space, double t);

enum class TraceKind {
    Value,        ///< (1/tau) int chi(s(t), t) dt
    LatentFlux,   ///< (1/tau) int gamma(s(t), t) s'(t) dt
};

/// Boundary curve with its time derivative.
struct Curve {
    TimeFunction value;
    TimeFunction slope;
};

/// Steklov average of a boundary trace over step k.
double steklov_trace_avg(TraceKind kind, const Field& field, const Curve& s, std::size_t k, const TimeGrid& time);

} // namespace isp
