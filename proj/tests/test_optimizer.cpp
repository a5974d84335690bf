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

#include "isp/error.hpp"
#include "isp/optimizer.hpp"
#include "support/manufactured.hpp"
#include "support/synthetic.hpp"

using namespace isp;

namespace {

struct Synthetic {
    DiscreteControl truth;
    ProblemData data;
};

Synthetic synthetic(std::size_t n) {
    const auto m = isp::testing::manufactured();
    Synthetic s;
    s.truth = map_Qn(m.control, build_time_grid(1.0, n), isp::testing::manufactured_grid(n));
    s.data = isp::testing::consistent_data(s.truth, m.data);
    return s;
}

DiscreteControl perturbed_flux(const DiscreteControl& c, double amp) {
    DiscreteControl d = c;
    for (std::size_t k = 0; k < d.g.size(); ++k) d.g[k] *= 1.0 + amp * std::cos(3.0 * c.time.node(k));
    return d;
}

} // namespace

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    SolverConfig bad = cfg;
    bad.rho = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.armijo_c1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.backtrack = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = cfg;
    bad.A0 = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("the truth is a fixed point") {
    const Synthetic syn = synthetic(8);
    const MinimizeResult res = minimize(syn.truth, syn.data, SolverConfig{});
    REQUIRE(!res.record.stages.empty());
    CHECK(res.record.stages[0].stop_reason == "grad_tol");
    CHECK(res.record.stages[0].iterations == 0);
    CHECK(res.record.stages[0].cost.total <= 1e-16);
    CHECK(res.record.converged);
    CHECK(res.record.status == "converged");
    CHECK(res.control.s == syn.truth.s);
    CHECK(res.control.g == syn.truth.g);
}

TEST_CASE("final boundary misfit alone drives s_n to s*") {
    const Synthetic syn = synthetic(8);
    ProblemData d = syn.data;
    d.beta0 = d.beta1 = 0.0;
    d.beta2 = 1.0;
    d.s_star = syn.truth.s.back() + 0.1;
    SolverConfig cfg;
    cfg.free_blocks = {true, false, false};
    cfg.grad_tol = 1e-20;
    cfg.inner_iters = 60;
    const MinimizeResult res = minimize(syn.truth, d, cfg);
    const auto& it = res.record.iterations;
    REQUIRE(it.size() >= 3);
    CHECK(it.front().cost.total == doctest::Approx(0.01));
    CHECK(it.back().cost.total <= 1e-16);
    CHECK(std::abs(res.control.s.back() - d.s_star) <= 1e-8);
    for (std::size_t k = 0; k + 1 < res.control.s.size(); ++k) CHECK(res.control.s[k] == syn.truth.s[k]);
    // the error contracts by a fixed factor until it reaches round-off
    for (std::size_t j = 1; j < it.size(); ++j) {
        if (it[j - 1].cost.total < 1e-20) break;
        CHECK(it[j].cost.total <= 0.6 * it[j - 1].cost.total);
    }
}

TEST_CASE("accepted steps satisfy the descent condition") {
    const Synthetic syn = synthetic(8);
    SolverConfig cfg;
    cfg.inner_iters = 15;
    cfg.outer_iters = 1;
    const MinimizeResult res = minimize(perturbed_flux(syn.truth, 0.2), syn.data, cfg);
    const auto& it = res.record.iterations;
    REQUIRE(it.size() >= 3);
    for (std::size_t j = 1; j < it.size(); ++j) {
        if (it[j].stage != it[j - 1].stage) continue;
        CHECK(it[j].cost.total <= it[j - 1].cost.total);
        CHECK(it[j].step > 0.0);
    }
    CHECK(it.back().cost.total < 0.1 * it.front().cost.total);
    CHECK(is_feasible(res.control, syn.data));
    const Projection p = project(res.control, syn.data);
    CHECK(p.control.s == res.control.s);
    CHECK(p.control.g == res.control.g);
}

TEST_CASE("iterates stay in a tight control ball") {
    Synthetic syn = synthetic(8);
    ProblemData d = syn.data;
    const double R = control_norms(syn.truth).max() * 1.02;
    d.R = R;
    SolverConfig cfg;
    cfg.inner_iters = 10;
    cfg.outer_iters = 1;
    const MinimizeResult res = minimize(perturbed_flux(syn.truth, 0.5), d, cfg);
    CHECK(control_norms(res.control).max() <= R * (1.0 + 1e-9));
    CHECK(is_feasible(res.control, d));
    CHECK(res.control.s[0] == d.s0);
    CHECK(res.control.s[1] == d.s0);
}

TEST_CASE("penalty stages reduce the violation") {
    Synthetic syn = synthetic(8);
    ProblemData d = syn.data;
    double umax = 0.0;
    const StateTrajectory traj = forward_solve(syn.truth, d);
    for (std::size_t k = 1; k <= 8; ++k) {
        for (std::size_t i = 0; i < traj.active(k); ++i) umax = std::max(umax, traj.u(k, i));
    }
    d.u_star = umax - 0.05;
    d.beta0 = d.beta1 = d.beta2 = 0.01;
    SolverConfig cfg;
    cfg.violation_tol = 1e-30;
    cfg.grad_tol = 1e-14;
    cfg.inner_iters = 40;
    const MinimizeResult res = minimize(syn.truth, d, cfg);
    REQUIRE(res.record.stages.size() == 3);
    const double v0 = violation_measure(traj, d);
    double prev = v0;
    for (const StageSummary& st : res.record.stages) {
        CHECK(st.violation <= prev * 1.1);
        prev = st.violation;
    }
    CHECK(prev < 0.1 * v0);
    CHECK(res.record.status == "stages_exhausted");
    CHECK_FALSE(res.record.converged);
    CHECK(res.record.stages[1].A == doctest::Approx(10.0));
    CHECK(res.record.stages[2].A == doctest::Approx(100.0));
}
