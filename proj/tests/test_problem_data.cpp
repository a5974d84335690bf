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

#include "isp/error.hpp"
#include "isp/problem.hpp"
#include "isp/quadrature.hpp"
#include "support/oracles.hpp"

using namespace isp;
using isp::testing::adaptive_simpson;
using isp::testing::adaptive_simpson2;

TEST_CASE("field sampling") {
    CHECK(sample_field(Field::constant(3.0), 0.3, 0.9) == 3.0);
    CHECK(Field::preset("zero")(1.0, 1.0) == 0.0);
    CHECK(Field::preset("one")(1.0, 1.0) == 1.0);
    CHECK(Field::preset("constant", {{"value", -2.0}})(0.0, 0.0) == -2.0);
    CHECK_THROWS_AS(Field::preset("bogus"), InvalidArgument);
    CHECK(Field::polynomial({{1.0, 1, 1}})(0.5, 2.0) == 1.0);
}

TEST_CASE("bilinear table reproduces affine data") {
    std::vector<double> xs{0.0, 0.3, 0.7, 1.0};
    std::vector<double> ts{0.0, 0.5, 2.0};
    std::vector<double> v;
    for (double x : xs) {
        for (double t : ts) v.push_back(x + t);
    }
    const Field f = Field::tabulated(xs, ts, v);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            const double x = 0.5 * (xs[i] + xs[i + 1]);
            const double t = 0.5 * (ts[k] + ts[k + 1]);
            CHECK(f(x, t) == doctest::Approx(x + t).epsilon(1e-14));
            CHECK(f.dx(x, t) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(f(1.5, 0.0), DomainError);
}

TEST_CASE("step table conventions") {
    const Field f = Field::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, {0, 1, 2, 10, 11, 12, 20, 21, 22},
                                     Interpolation::Step);
    CHECK(f(0.5, 0.5) == 1.0);   // left x node, right t node
    CHECK(f(1.0, 1.0) == 11.0);
    CHECK(f(1.0, 1.25) == 12.0);
    CHECK(f(0.0, 0.0) == 0.0);
    CHECK(f.dx(0.5, 0.5) == 0.0);
}

TEST_CASE("degenerate table axes are constant") {
    const Field w = Field::tabulated({0.0, 1.0}, {5.0}, {1.0, 3.0});
    CHECK(w(0.5, 0.0) == doctest::Approx(2.0));
    CHECK(w(0.5, 99.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(Field::tabulated({0.0, 0.0}, {0.0}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("domain checks") {
    Field f = Field::constant(1.0);
    f.set_domain({0.0, 1.0, 0.0, 2.0});
    CHECK(f(1.0, 2.0) == 1.0);
    CHECK_THROWS_AS(f(1.01, 0.0), DomainError);
    CHECK_THROWS_AS(f(0.5, -0.5), DomainError);
}

TEST_CASE("steklov time averages") {
    const TimeGrid g = build_time_grid(1.0, 4);
    CHECK(steklov_time_avg([](double) { return 2.5; }, 3, g) == doctest::Approx(2.5));
    CHECK(steklov_time_avg([](double t) { return t; }, 1, g) == doctest::Approx(0.125));
    for (std::size_t k = 1; k <= 4; ++k) {
        const double a = g.node(k - 1);
        const double b = g.node(k);
        const double oracle = adaptive_simpson([](double t) { return t * t; }, a, b) / g.tau();
        CHECK(steklov_time_avg([](double t) { return t * t; }, k, g) == doctest::Approx(oracle).epsilon(1e-13));
        CHECK(oracle == doctest::Approx((b * b * b - a * a * a) / (3.0 * g.tau())).epsilon(1e-12));
    }
}

TEST_CASE("steklov cell averages") {
    const TimeGrid tg = build_time_grid(1.0, 4);
    GridOptions o;
    o.m0 = 5;
    o.ell = 1.0;
    o.delta = 0.5;
    const SpatialGrid sg = build_spatial_grid(std::vector<double>(5, 1.0), o, tg);
    CHECK(steklov_cell_avg(Field::constant(4.0), 2, 3, tg, sg) == 4.0);
    CHECK(steklov_cell_avg([](double x, double) { return x; }, 0, 1, tg, sg) == doctest::Approx(0.1));
    auto xt = [](double x, double t) { return x * t; };
    for (std::size_t i = 0; i < sg.cells(); ++i) {
        for (std::size_t k = 1; k <= 4; ++k) {
            const double exact = (sg.x(i) + sg.x(i + 1)) * (tg.node(k - 1) + tg.node(k)) / 4.0;
            const double oracle = adaptive_simpson2(xt, sg.x(i), sg.x(i + 1), tg.node(k - 1), tg.node(k)) /
                                  (sg.step(i) * tg.tau());
            CHECK(steklov_cell_avg(xt, i, k, tg, sg) == doctest::Approx(exact).epsilon(1e-13));
            CHECK(oracle == doctest::Approx(exact).epsilon(1e-10));
        }
    }
}

TEST_CASE("steklov trace averages") {
    const TimeGrid g = build_time_grid(1.0, 4);
    const double tau = g.tau();
    const Curve moving{[](double t) { return 1.0 + t * t; }, [](double t) { return 2.0 * t; }};
    CHECK(steklov_trace_avg(TraceKind::Value, Field::constant(0.7), moving, 2, g) == doctest::Approx(0.7));
    const Curve linear{[](double t) { return 1.0 + 0.3 * t; }, [](double) { return 0.3; }};
    CHECK(steklov_trace_avg(TraceKind::LatentFlux, Field::constant(1.0), linear, 3, g) == doctest::Approx(0.3));
    const Field x = Field::polynomial({{1.0, 1, 0}});
    const double oracle = adaptive_simpson([&](double t) { return moving.value(t); }, 0.0, tau) / tau;
    CHECK(steklov_trace_avg(TraceKind::Value, x, moving, 1, g) == doctest::Approx(1.0 + tau * tau / 3.0));
    CHECK(oracle == doctest::Approx(1.0 + tau * tau / 3.0).epsilon(1e-12));
}

TEST_CASE("steklov averaging is linear and monotone") {
    const TimeGrid g = build_time_grid(2.0, 7);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double c1 = U(rng), c2 = U(rng), c3 = U(rng), alpha = U(rng);
        auto r1 = [&](double t) { return c1 + c2 * std::sin(3.0 * t); };
        auto r2 = [&](double t) { return c3 * t * t; };
        const std::size_t k = 1 + rng() % 7;
        const double lhs = steklov_time_avg([&](double t) { return alpha * r1(t) + r2(t); }, k, g);
        const double rhs = alpha * steklov_time_avg(r1, k, g) + steklov_time_avg(r2, k, g);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(steklov_time_avg([&](double t) { return std::abs(r1(t)); }, k, g) >= 0.0);
    }
}

TEST_CASE("problem validation and ellipticity audit") {
    ProblemData d;
    d.a = Field::polynomial({{1.0, 0, 0}, {0.5, 1, 0}});
    d.a0 = 0.9;
    d.s0 = 1.0;
    d.ell = 2.0;
    d.delta = 0.5;
    d.s_star = 1.2;
    CHECK_NOTHROW(d.validate());
    const TimeGrid tg = build_time_grid(1.0, 4);
    GridOptions o;
    o.m0 = 4;
    o.ell = 2.0;
    o.delta = 0.5;
    const SpatialGrid sg = build_spatial_grid(std::vector<double>(5, 1.0), o, tg);
    EllipticityAudit audit = audit_ellipticity(d, tg, sg);
    CHECK(audit.ok);
    CHECK(audit.min_a == doctest::Approx(1.0));
    d.a0 = 1.1;
    CHECK_FALSE(audit_ellipticity(d, tg, sg).ok);

    ProblemData bad = d;
    bad.beta0 = bad.beta1 = bad.beta2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = d;
    bad.s0 = 0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = d;
    bad.s_star = 3.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
