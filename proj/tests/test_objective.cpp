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

#include <doctest.h>

#include <cmath>
#include <random>

#include "isp/control.hpp"
#include "isp/forward.hpp"
#include "isp/objective.hpp"
#include "support/manufactured.hpp"
#include "support/oracles.hpp"

using namespace isp;
using isp::testing::adaptive_simpson;

namespace {

// n = 2 steps, two cells [0, 1] and [1, 2], boundary fixed at x = 1.
struct Tiny {
    ProblemData data;
    DiscreteControl control;
    StateTrajectory traj;
};

Tiny tiny(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Tiny t;
    t.data.s0 = 1.0;
    t.data.ell = 2.0;
    t.data.delta = 0.5;
    t.data.s_star = 1.0 + 0.1 * U(rng);
    t.data.u_star = 0.2 * U(rng);
    t.data.beta0 = 1.0 + U(rng);
    t.data.beta1 = 1.0 + U(rng);
    t.data.beta2 = 1.0 + U(rng);
    t.data.w = Field::constant(U(rng));
    t.data.mu = Field::constant(U(rng));
    GridOptions o;
    o.m0 = 1;
    o.ell = 2.0;
    o.delta = 0.5;
    o.coupling = 10.0;
    const TimeGrid tg = build_time_grid(1.0, 2);
    const std::vector<double> s(3, 1.0);
    const SpatialGrid sg = build_spatial_grid(s, o, tg);
    t.control = make_control(tg, s, {0, 0, 0}, Matrix(2, sg.cells()), o);
    t.traj.time = tg;
    t.traj.space = sg;
    t.traj.s = s;
    t.traj.u = Matrix(3, sg.cells() + 1);
    for (double& x : t.traj.u.data()) x = U(rng);
    return t;
}

} // namespace

TEST_CASE("subplus") {
    CHECK(subplus(-1.0) == 0.0);
    CHECK(subplus(0.0) == 0.0);
    CHECK(subplus(2.5) == 2.5);
}

TEST_CASE("truncation is a contraction") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng() % 30;
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double h = 0.01 + std::abs(N(rng));
            const double u = N(rng), v = N(rng);
            const double a = subplus(u) - subplus(v);
            lhs += h * (a * a);
            rhs += h * ((u - v) * (u - v));
        }
        CHECK(lhs <= rhs);
    }
}

TEST_CASE("discrete cost matches expanded sums") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Tiny t = tiny(rng);
        const StateTrajectory& u = t.traj;
        const ProblemData& d = t.data;
        const double w = d.w(0.0, 1.0), mu = d.mu(0.0, 0.0), A = 3.0;
        const double final_misfit = d.beta0 * 1.0 * std::pow(u.u(2, 0) - w, 2);
        const double boundary = d.beta1 * 0.5 * (std::pow(u.u(1, 1) - mu, 2) + std::pow(u.u(2, 1) - mu, 2));
        const double bf = d.beta2 * std::pow(1.0 - d.s_star, 2);
        const double viol = 0.5 * (std::pow(subplus(u.u(1, 0) - d.u_star), 2) + std::pow(subplus(u.u(2, 0) - d.u_star), 2));
        const CostBreakdown c = cost_discrete(u, t.control, d, A);
        CHECK(c.final_misfit == doctest::Approx(final_misfit).epsilon(1e-14));
        CHECK(c.boundary_misfit == doctest::Approx(boundary).epsilon(1e-14));
        CHECK(c.boundary_final == doctest::Approx(bf).epsilon(1e-14));
        CHECK(c.constraint_violation == doctest::Approx(viol).epsilon(1e-14));
        CHECK(c.penalty == doctest::Approx(A * viol).epsilon(1e-14));
        CHECK(c.total == doctest::Approx(final_misfit + boundary + bf + A * viol).epsilon(1e-14));
        CHECK(violation_measure(u, d) == doctest::Approx(viol).epsilon(1e-14));
    }
}

TEST_CASE("discrete cost examples") {
    std::mt19937_64 rng(8);
    Tiny t = tiny(rng);
    for (std::size_t k = 0; k <= 2; ++k) {
        t.traj.u(k, 0) = 0.3;
        t.traj.u(k, 1) = -0.2;
        t.traj.u(k, 2) = 0.0;
    }
    t.data.w = Field::constant(0.3);
    t.data.mu = Field::constant(-0.2);
    t.data.s_star = 1.0;
    t.data.u_star = 1.0;
    CHECK(cost_discrete(t.traj, t.control, t.data, 10.0).total <= 1e-30);

    t.data.beta0 = t.data.beta1 = 0.0;
    t.data.beta2 = 1.0;
    t.data.s_star = 0.9;
    CHECK(cost_discrete(t.traj, t.control, t.data, 10.0).total == doctest::Approx(0.01));
}

TEST_CASE("penalty is linear and the cost monotone in A") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        Tiny t = tiny(rng);
        const CostBreakdown c1 = cost_discrete(t.traj, t.control, t.data, 1.0);
        double prev = c1.total;
        for (double A : {2.0, 10.0, 100.0}) {
            const CostBreakdown c = cost_discrete(t.traj, t.control, t.data, A);
            CHECK(c.penalty == doctest::Approx(A * c1.penalty));
            CHECK(c.total >= prev);
            CHECK(c.final_misfit >= 0.0);
            CHECK(c.boundary_misfit >= 0.0);
            prev = c.total;
        }
    }
}

TEST_CASE("measurement averages") {
    const auto m = isp::testing::manufactured();
    const TimeGrid tg = build_time_grid(1.0, 8);
    const DiscreteControl c = map_Qn(m.control, tg, isp::testing::manufactured_grid(8));
    const Measurements meas = sample_measurements(tg, c.space, m.data);
    for (std::size_t i = 0; i < c.cells(); ++i) {
        const double oracle = adaptive_simpson([&](double x) { return m.data.w(x, 1.0); }, c.space.x(i),
                                               c.space.x(i + 1)) /
                              c.space.step(i);
        CHECK(meas.w[i] == doctest::Approx(oracle).epsilon(1e-12));
    }
    for (std::size_t k = 1; k <= 8; ++k) {
        const double oracle =
            adaptive_simpson([&](double t) { return m.data.mu(0.0, t); }, tg.node(k - 1), tg.node(k)) / tg.tau();
        CHECK(meas.mu[k - 1] == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("continuous cost examples") {
    const auto m = isp::testing::manufactured();
    const CostBreakdown zero = cost_continuous(m.u, m.control, m.data, 1.0);
    CHECK(zero.total == doctest::Approx(0.0).scale(1e-12));

    ProblemData d;
    d.u_star = 0.5;
    d.beta0 = d.beta1 = d.beta2 = 0.0;
    d.T = 1.0;
    const ContinuousControl v{Curve{[](double) { return 1.0; }, [](double) { return 0.0; }}, [](double) { return 0.0; },
                              [](double, double) { return 0.0; }};
    const CostBreakdown pen = cost_continuous([](double, double) { return 1.5; }, v, d, 1.0);
    CHECK(pen.penalty == doctest::Approx(1.0));
    CHECK(pen.total == doctest::Approx(1.0));
}

TEST_CASE("continuous cost against adaptive quadrature") {
    const auto m = isp::testing::manufactured(0.2, 0.1);
    ProblemData d = m.data;
    d.u_star = 1.3;
    d.s_star = 1.1;
    auto u = [&](double x, double t) { return m.u(x, t) + 0.05 * std::cos(4.0 * x + t); };
    const CostBreakdown c = cost_continuous(u, m.control, d, 2.0);
    const double sT = m.control.s.value(1.0);
    const double fm = adaptive_simpson([&](double x) { return std::pow(u(x, 1.0) - d.w(x, 1.0), 2); }, 0.0, sT);
    const double bm = adaptive_simpson(
        [&](double t) { return std::pow(u(m.control.s.value(t), t) - d.mu(0.0, t), 2); }, 0.0, 1.0);
    const double pv = adaptive_simpson(
        [&](double t) {
            return adaptive_simpson([&](double x) { return std::pow(subplus(u(x, t) - d.u_star), 2); }, 0.0,
                                    m.control.s.value(t), 1e-14);
        },
        0.0, 1.0, 1e-13);
    CHECK(c.final_misfit == doctest::Approx(fm).epsilon(1e-8));
    CHECK(c.boundary_misfit == doctest::Approx(bm).epsilon(1e-8));
    CHECK(c.constraint_violation == doctest::Approx(pv).epsilon(1e-8));
    CHECK(c.boundary_final == doctest::Approx(std::pow(sT - 1.1, 2)));
}
