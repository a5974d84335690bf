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

#include "isp/objective.hpp"

#include "isp/quadrature.hpp"

namespace isp {

Measurements sample_measurements(const TimeGrid& time, const SpatialGrid& space, const ProblemData& data) {
    Measurements m;
    m.w.resize(space.cells());
    for (std::size_t i = 0; i < space.cells(); ++i) m.w[i] = cell_avg(data.w, i, space, data.T);
    m.mu.resize(time.steps());
    for (std::size_t k = 1; k <= time.steps(); ++k) {
        m.mu[k - 1] = steklov_time_avg([&](double t) { return data.mu_at(t); }, k, time);
    }
    return m;
}

CostBreakdown cost_discrete(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                            const Measurements& meas, double A) {
    const std::size_t n = traj.time.steps();
    const double tau = traj.time.tau();
    const SpatialGrid& space = traj.space;
    CostBreakdown c;
    c.A = A;

    const std::size_t mn = space.active(n);
    for (std::size_t i = 0; i < mn; ++i) {
        const double d = traj.u(n, i) - meas.w[i];
        c.final_misfit += space.step(i) * d * d;
    }
    c.final_misfit *= data.beta0;

    for (std::size_t k = 1; k <= n; ++k) {
        const double d = traj.u(k, space.active(k)) - meas.mu[k - 1];
        c.boundary_misfit += tau * d * d;
    }
    c.boundary_misfit *= data.beta1;

    const double ds = control.s[n] - data.s_star;
    c.boundary_final = data.beta2 * ds * ds;

    c.constraint_violation = violation_measure(traj, data);
    c.penalty = A * c.constraint_violation;
    c.total = c.final_misfit + c.boundary_misfit + c.boundary_final + c.penalty;
    return c;
}

CostBreakdown cost_discrete(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                            double A) {
    return cost_discrete(traj, control, data, sample_measurements(traj.time, traj.space, data), A);
}

double violation_measure(const StateTrajectory& traj, const ProblemData& data) {
    const double tau = traj.time.tau();
    double acc = 0.0;
    for (std::size_t k = 1; k <= traj.time.steps(); ++k) {
        for (std::size_t i = 0; i < traj.active(k); ++i) {
            const double e = subplus(traj.u(k, i) - data.u_star);
            acc += tau * traj.space.step(i) * e * e;
        }
    }
    return acc;
}

CostBreakdown cost_continuous(const std::function<double(double, double)>& u, const ContinuousControl& v,
                              const ProblemData& data, double A, const QuadratureOptions& q) {
    const double T = data.T;
    const double sT = v.s.value(T);
    CostBreakdown c;
    c.A = A;
    c.final_misfit = data.beta0 * quad::integrate(
                                      [&](double x) {
                                          const double d = u(x, T) - data.w_at(x);
                                          return d * d;
                                      },
                                      0.0, sT, q.space_panels);
    c.boundary_misfit = data.beta1 * quad::integrate(
                                         [&](double t) {
                                             const double d = u(v.s.value(t), t) - data.mu_at(t);
                                             return d * d;
                                         },
                                         0.0, T, q.time_panels);
    c.boundary_final = data.beta2 * (sT - data.s_star) * (sT - data.s_star);
    c.constraint_violation = quad::integrate(
        [&](double t) {
            return quad::integrate(
                [&](double x) {
                    const double e = subplus(u(x, t) - data.u_star);
                    return e * e;
                },
                0.0, v.s.value(t), q.space_panels);
        },
        0.0, T, q.time_panels);
    c.penalty = A * c.constraint_violation;
    c.total = c.final_misfit + c.boundary_misfit + c.boundary_final + c.penalty;
    return c;
}

} // namespace isp
