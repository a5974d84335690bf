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
#include "isp/error.hpp"

using namespace isp;

namespace {

GridOptions options(std::size_t m0 = 4, double ell = 2.0, double delta = 0.5) {
    GridOptions o;
    o.m0 = m0;
    o.ell = ell;
    o.delta = delta;
    o.coupling = 10.0;
    return o;
}

double brute_b22(const std::vector<double>& s, double tau) {
    const std::size_t n = s.size() - 1;
    double acc = 0.0;
    for (std::size_t k = 0; k <= n - 1; ++k) acc += tau * s[k] * s[k];
    for (std::size_t k = 1; k <= n; ++k) acc += tau * std::pow((s[k] - s[k - 1]) / tau, 2);
    for (std::size_t k = 1; k <= n - 1; ++k) acc += tau * std::pow((s[k + 1] - 2 * s[k] + s[k - 1]) / (tau * tau), 2);
    return std::sqrt(acc);
}

DiscreteControl constant_control(std::size_t n, double s0, double g, double f) {
    const TimeGrid tg = build_time_grid(1.0, n);
    const std::vector<double> s(n + 1, s0);
    const SpatialGrid sg = build_spatial_grid(s, options(), tg);
    return make_control(tg, s, std::vector<double>(n + 1, g), Matrix(n, sg.cells(), f), options());
}

ProblemData data_for(double R) {
    ProblemData d;
    d.R = R;
    d.delta = 0.5;
    d.s0 = 1.0;
    d.ell = 2.0;
    return d;
}

} // namespace

TEST_CASE("b22 norm examples") {
    CHECK(norm_b22(std::vector<double>(9, -1.5), 1.0 / 8) == doctest::Approx(1.5));
    const double tau = 0.1, v = 0.7;
    std::vector<double> s(11);
    double head = 0.0;
    for (std::size_t k = 0; k <= 10; ++k) {
        s[k] = v * k * tau;
        if (k < 10) head += tau * s[k] * s[k];
    }
    CHECK(norm_b22(s, tau) == doctest::Approx(std::sqrt(head + 1.0 * v * v)).epsilon(1e-13));
    const std::vector<double> three{1.0, 2.0, 0.5};
    CHECK(norm_b22(three, 0.5) == doctest::Approx(brute_b22(three, 0.5)).epsilon(1e-14));
}

TEST_CASE("b22 and b21 against brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 20;
        const double tau = 0.05 + std::abs(U(rng));
        std::vector<double> s(n + 1);
        for (double& x : s) x = U(rng);
        CHECK(norm_b22(s, tau) == doctest::Approx(brute_b22(s, tau)).epsilon(1e-12));
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += tau * s[k] * s[k];
        for (std::size_t k = 1; k <= n; ++k) acc += std::pow(s[k] - s[k - 1], 2) / tau;
        CHECK(norm_b21(s, tau) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
    }
}

TEST_CASE("b21 and l2 examples") {
    CHECK(norm_b21(std::vector<double>(5, 3.0), 0.25) == doctest::Approx(3.0));
    const DiscreteControl d = constant_control(4, 1.0, 0.0, -2.0);
    CHECK(norm_l2(d.f, d.time, d.space) == doctest::Approx(2.0 * std::sqrt(2.0)));

    const TimeGrid tg = build_time_grid(1.0, 2);
    GridOptions o = options(1, 2.0);
    const SpatialGrid sg = build_spatial_grid({1.0, 1.0, 1.0}, o, tg);
    REQUIRE(sg.cells() == 2);
    Matrix f(2, 2);
    f(0, 0) = 0.3;
    f(0, 1) = -1.2;
    f(1, 0) = 2.0;
    f(1, 1) = 0.7;
    const double hand = 0.5 * 1.0 * (0.09 + 1.44 + 4.0 + 0.49);
    CHECK(norm_l2(f, tg, sg) == doctest::Approx(std::sqrt(hand)).epsilon(1e-14));
}

TEST_CASE("Q_n samples and averages") {
    const TimeGrid tg = build_time_grid(1.0, 4);
    ContinuousControl v{Curve{[](double) { return 1.2; }, [](double) { return 0.0; }}, [](double t) { return t; },
                        [](double x, double) { return x; }};
    const DiscreteControl d = map_Qn(v, tg, options());
    for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(d.s[k] == 1.2);
        CHECK(d.g[k] == doctest::Approx(0.25 * k));
    }
    for (std::size_t i = 0; i < d.cells(); ++i) {
        CHECK(d.f(2, i) == doctest::Approx(0.5 * (d.space.x(i) + d.space.x(i + 1))).epsilon(1e-14));
    }
    ContinuousControl c{Curve{[](double) { return 1.0; }, [](double) { return 0.0; }}, [](double) { return -0.4; },
                        [](double, double) { return 2.5; }};
    const DiscreteControl dc = map_Qn(c, tg, options());
    CHECK(dc.g == std::vector<double>(5, -0.4));
    for (double x : dc.f.data()) CHECK(x == doctest::Approx(2.5));
}

TEST_CASE("P_n formulas") {
    const TimeGrid tg = build_time_grid(2.0, 2);
    const std::vector<double> s{1.0, 1.0, 1.1};
    CHECK(boundary_value(s, tg, 2.0) == doctest::Approx(1.05));
    CHECK(boundary_value(s, tg, 0.5) == 1.0);
    CHECK(boundary_value(s, tg, 1.0) == 1.0);
    CHECK(boundary_value(s, tg, 1.5) == doctest::Approx(1.0 + 0.5 * 0.25 * 0.1));

    const DiscreteControl d = constant_control(4, 1.0, 0.0, 0.0);
    const ContinuousControl c = map_Pn(d);
    for (double t : {0.0, 0.1, 0.5, 0.99, 1.0}) CHECK(c.s.value(t) == 1.0);

    DiscreteControl lin = constant_control(2, 1.0, 0.0, 0.0);
    lin.g = {0.0, 0.5, 1.0};
    const ContinuousControl cl = map_Pn(lin);
    for (double t : {0.0, 0.3, 0.8, 1.0}) CHECK(cl.g(t) == doctest::Approx(t));
}

TEST_CASE("s^n is continuous at the nodes") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.6, 1.8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng() % 12;
        const TimeGrid tg = build_time_grid(1.0 + U(rng), n);
        std::vector<double> s(n + 1);
        for (double& x : s) x = U(rng);
        s[1] = s[0];
        for (std::size_t k = 1; k < n; ++k) {
            const double left = boundary_value(s, tg, tg.node(k));
            const double right = boundary_value(s, tg, tg.node(k) + 1e-13);
            CHECK(std::abs(left - right) < 1e-11);
        }
    }
}

TEST_CASE("Q_n after P_n preserves g and f") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 8;
        const TimeGrid tg = build_time_grid(1.0, n);
        std::vector<double> s(n + 1, 1.0), g(n + 1);
        for (double& x : g) x = U(rng);
        const SpatialGrid sg = build_spatial_grid(s, options(), tg);
        Matrix f(n, sg.cells());
        for (double& x : f.data()) x = U(rng);
        const DiscreteControl d = make_control(tg, s, g, f, options());
        const DiscreteControl back = map_Qn(map_Pn(d), tg, options());
        for (std::size_t k = 0; k <= n; ++k) CHECK(back.g[k] == doctest::Approx(g[k]).epsilon(1e-14));
        for (std::size_t j = 0; j < f.data().size(); ++j) {
            CHECK(back.f.data()[j] == doctest::Approx(f.data()[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("Q_n of a smooth boundary is Lipschitz and bounded") {
    // s(t) = 1 + 0.3 sin(2t)^2 has |s'| <= 0.3 * 2 = 0.6.
    const Curve s{[](double t) { return 1.0 + 0.3 * std::pow(std::sin(2.0 * t), 2); },
                  [](double t) { return 0.6 * std::sin(4.0 * t); }};
    ContinuousControl v{s, [](double t) { return std::cos(t); }, [](double, double) { return 0.0; }};
    double prev_norm = 0.0;
    for (std::size_t n : {8, 16, 32, 64, 128}) {
        const TimeGrid tg = build_time_grid(1.0, n);
        const DiscreteControl d = map_Qn(v, tg, options(8, 2.0));
        for (std::size_t k = 2; k <= n; ++k) CHECK(std::abs(d.s[k] - d.s[k - 1]) <= 0.6 * tg.tau() + 1e-15);
        const double norm = norm_b21(d.g, tg.tau());
        if (prev_norm > 0.0) CHECK(std::abs(norm - prev_norm) < 0.05);
        prev_norm = norm;
    }
    // continuous b21 norm of cos on [0, 1]
    const double exact = std::sqrt(0.5 + 0.25 * std::sin(2.0) + 0.5 - 0.25 * std::sin(2.0));
    CHECK(prev_norm == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("projection examples") {
    const ProblemData data = data_for(100.0);
    DiscreteControl d = constant_control(4, 1.0, 0.2, 0.1);
    d.s = {1.0, 1.0, 1.1, 1.2, 1.15};
    d = with_boundary(d, d.s);
    const Projection p = project(d, data);
    CHECK(p.control.s == d.s);
    CHECK(p.control.g == d.g);
    CHECK(p.control.f.data() == d.f.data());
    CHECK(is_feasible(d, data));

    DiscreteControl low = d;
    low.s[3] = 0.25;
    const Projection pl = project(low, data);
    CHECK(pl.control.s[3] == 0.5);
    CHECK(pl.report.clamped_low == 1);
    CHECK_FALSE(is_feasible(low, data));

    DiscreteControl big = constant_control(4, 1.0, 0.0, 1.0);
    const double fn = norm_l2(big.f, big.time, big.space);
    const ProblemData tight = data_for(fn / 2.0);
    const Projection pf = project(big, tight);
    CHECK(pf.report.scaled_f);
    CHECK(norm_l2(pf.control.f, pf.control.time, pf.control.space) == doctest::Approx(fn / 2.0).epsilon(1e-12));
}

TEST_CASE("projection re-imposes the anchor and is idempotent") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng() % 8;
        DiscreteControl d = constant_control(n, 1.0, 0.0, 0.0);
        for (double& x : d.s) x = 0.5 + 1.4 * U(rng);
        for (double& x : d.g) x = 4.0 * U(rng) - 2.0;
        d = with_boundary(d, d.s);
        for (double& x : d.f.data()) x = 6.0 * U(rng) - 3.0;
        if (trial % 2 == 0) d.s[n] = 0.2;
        const ProblemData data = data_for(0.5 + 5.0 * U(rng));
        const Projection once = project(d, data);
        CHECK(once.control.s[0] == data.s0);
        CHECK(once.control.s[1] == data.s0);
        for (double x : once.control.s) CHECK(x >= data.delta);
        if (!once.report.anchor_infeasible) {
            const ControlNorms nm = control_norms(once.control);
            CHECK(nm.max() <= data.R * (1.0 + 1e-9));
        }
        const Projection twice = project(once.control, data);
        CHECK(twice.control.s == once.control.s);
        CHECK(twice.control.g == once.control.g);
        for (std::size_t j = 0; j < once.control.f.data().size(); ++j) {
            CHECK(twice.control.f.data()[j] == doctest::Approx(once.control.f.data()[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("compatibility mode pins the initial flux") {
    ProblemData data = data_for(100.0);
    data.phi = Field::polynomial({{1.0, 0, 0}, {0.5, 1, 0}});
    data.a = Field::constant(2.0);
    data.chi = Field::constant(0.3);
    const DiscreteControl d = constant_control(4, 1.0, 0.0, 0.0);
    const Projection p = project(d, data, FeasibleSet::WRCompat);
    CHECK(p.control.g[0] == doctest::Approx(1.0));
    CHECK(p.report.stefan_compat_residual == doctest::Approx(0.3 - 1.0));
    CHECK(p.control.g[1] == 0.0);
}

TEST_CASE("besov seminorm diagnostic") {
    CHECK(besov_seminorm_diag(std::vector<double>(7, 2.0), 0.1, 0.5) == 0.0);
    // two samples 0, 1 at spacing h: two ordered pairs, each h^2 / h^2
    CHECK(besov_seminorm_diag(std::vector<double>{0.0, 1.0}, 0.25, 0.5) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(besov_seminorm_diag(std::vector<double>{1.0}, 0.1, 0.5), InvalidArgument);
    CHECK_THROWS_AS(besov_seminorm_diag(std::vector<double>{1.0, 2.0}, 0.1, 1.0), InvalidArgument);
    auto linear = [](std::size_t m) {
        std::vector<double> v(m);
        const double h = 1.0 / m;
        for (std::size_t i = 0; i < m; ++i) v[i] = (i + 0.5) * h;
        return besov_seminorm_diag(v, h, 0.5);
    };
    const double a = linear(256), b = linear(512);
    CHECK(std::abs(a - b) / b < 0.05);
}
