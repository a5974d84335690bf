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

#include "isp/quadrature.hpp"

namespace isp {

double steklov_time_avg(const TimeFunction& r, std::size_t k, const TimeGrid& time) {
    const double a = time.node(k - 1);
    const double b = time.node(k);
    return quad::integrate(r, a, b) / (b - a);
}

double steklov_cell_avg(const SpaceTimeFunction& d, std::size_t i, std::size_t k, const TimeGrid& time,
                        const SpatialGrid& space) {
    const double xa = space.x(i);
    const double xb = space.x(i + 1);
    const double ta = time.node(k - 1);
    const double tb = time.node(k);
    return quad::integrate2(d, xa, xb, ta, tb) / ((xb - xa) * (tb - ta));
}

double steklov_cell_avg(const Field& d, std::size_t i, std::size_t k, const TimeGrid& time,
                        const SpatialGrid& space) {
    if (d.is_constant()) return d(space.x(i), time.node(k));
    return steklov_cell_avg([&](double x, double t) { return d(x, t); }, i, k, time, space);
}

double cell_avg(const Field& w, std::size_t i, const SpatialGrid& space, double t) {
    const double xa = space.x(i);
    const double xb = space.x(i + 1);
    return quad::integrate([&](double x) { return w(x, t); }, xa, xb) / (xb - xa);
}

double steklov_trace_avg(TraceKind kind, const Field& field, const Curve& s, std::size_t k, const TimeGrid& time) {
    const double a = time.node(k - 1);
    const double b = time.node(k);
    double integral = 0.0;
    if (kind == TraceKind::Value) {
        integral = quad::integrate([&](double t) { return field(s.value(t), t); }, a, b);
    } else {
        integral = quad::integrate([&](double t) { return field(s.value(t), t) * s.slope(t); }, a, b);
    }
    return integral / (b - a);
}

} // namespace isp
