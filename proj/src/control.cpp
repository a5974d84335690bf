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

#include "isp/control.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "isp/error.hpp"

namespace isp {

DiscreteControl make_control(const TimeGrid& time, std::vector<double> s, std::vector<double> g, Matrix f,
                             const GridOptions& options) {
    const std::size_t n = time.steps();
    if (s.size() != n + 1 || g.size() != n + 1) throw InvalidArgument("control: s and g need n+1 samples");
    DiscreteControl d;
    d.time = time;
    d.options = options;
    d.space = build_spatial_grid(s, options, time);
    if (f.rows() != n || f.cols() != d.space.cells()) throw InvalidArgument("control: f must be n x N");
    d.s = std::move(s);
    d.g = std::move(g);
    d.f = std::move(f);
    return d;
}

Matrix remap_source(const Matrix& f, const SpatialGrid& from, const SpatialGrid& to) {
    if (from.same_nodes(to)) return f;
    Matrix out(f.rows(), to.cells(), 0.0);
    for (std::size_t j = 0; j < to.cells(); ++j) {
        const double ya = to.x(j);
        const double yb = to.x(j + 1);
        std::size_t i = from.cell_containing(ya);
        std::vector<std::pair<std::size_t, double>> overlap;
        for (; i < from.cells() && from.x(i) < yb; ++i) {
            const double len = std::min(yb, from.x(i + 1)) - std::max(ya, from.x(i));
            if (len > 0.0) overlap.emplace_back(i, len);
        }
        const double width = yb - ya;
        for (std::size_t r = 0; r < f.rows(); ++r) {
            double acc = 0.0;
            for (const auto& [cell, len] : overlap) acc += len * f(r, cell);
            out(r, j) = acc / width;
        }
    }
    return out;
}

DiscreteControl with_boundary(const DiscreteControl& control, std::vector<double> s) {
    DiscreteControl d = control;
    d.space = build_spatial_grid(s, control.options, control.time);
    d.f = remap_source(control.f, control.space, d.space);
    d.s = std::move(s);
    return d;
}

double dot_b21(std::span<const double> u, std::span<const double> v, double tau) {
    const std::size_t n = u.size() - 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += tau * u[k] * v[k];
    for (std::size_t k = 1; k <= n; ++k) acc += ((u[k] - u[k - 1]) / tau) * ((v[k] - v[k - 1]) / tau) * tau;
    return acc;
}

double dot_b22(std::span<const double> u, std::span<const double> v, double tau) {
    const std::size_t n = u.size() - 1;
    double acc = dot_b21(u, v, tau);
    const double tau2 = tau * tau;
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        acc += tau * ((u[k + 1] - 2.0 * u[k] + u[k - 1]) / tau2) * ((v[k + 1] - 2.0 * v[k] + v[k - 1]) / tau2);
    }
    return acc;
}

double norm_b21(std::span<const double> v, double tau) {
    if (v.size() < 2) throw InvalidArgument("norm_b21: need at least 2 samples");
    return std::sqrt(dot_b21(v, v, tau));
}

double norm_b22(std::span<const double> s, double tau) {
    if (s.size() < 2) throw InvalidArgument("norm_b22: need at least 2 samples");
    return std::sqrt(dot_b22(s, s, tau));
}

double norm_l2(const Matrix& f, const TimeGrid& time, const SpatialGrid& space) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.rows(); ++k) {
        for (std::size_t i = 0; i < f.cols(); ++i) acc += time.tau() * space.step(i) * f(k, i) * f(k, i);
    }
    return std::sqrt(acc);
}

double ControlNorms::max() const noexcept { return std::max({s_b22, g_b21, f_l2}); }

ControlNorms control_norms(const DiscreteControl& d) {
    return {norm_b22(d.s, d.time.tau()), norm_b21(d.g, d.time.tau()), norm_l2(d.f, d.time, d.space)};
}

double boundary_value(std::span<const double> s, const TimeGrid& time, double t) {
    const std::size_t k = time.step_containing(t);
    if (k == 1) return s[0];
    const double tau = time.tau();
    const double d1 = (s[k - 1] - s[k - 2]) / tau;
    const double d2 = (s[k] - 2.0 * s[k - 1] + s[k - 2]) / (tau * tau);
    const double r = t - time.node(k - 1);
    return s[k - 1] + (r - 0.5 * tau) * d1 + 0.5 * r * r * d2;
}

double boundary_slope(std::span<const double> s, const TimeGrid& time, double t) {
    const std::size_t k = time.step_containing(t);
    if (k == 1) return 0.0;
    const double tau = time.tau();
    const double d1 = (s[k - 1] - s[k - 2]) / tau;
    const double d2 = (s[k] - 2.0 * s[k - 1] + s[k - 2]) / (tau * tau);
    return d1 + (t - time.node(k - 1)) * d2;
}

Curve boundary_curve(std::vector<double> s, const TimeGrid& time) {
    auto shared = std::make_shared<const std::vector<double>>(std::move(s));
    return Curve{[shared, time](double t) { return boundary_value(*shared, time, t); },
                 [shared, time](double t) { return boundary_slope(*shared, time, t); }};
}

DiscreteControl map_Qn(const ContinuousControl& v, const TimeGrid& time, const GridOptions& options) {
    const std::size_t n = time.steps();
    std::vector<double> s(n + 1);
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        s[k] = v.s.value(time.node(k));
        g[k] = v.g(time.node(k));
    }
    s[1] = s[0];
    const SpatialGrid space = build_spatial_grid(s, options, time);
    Matrix f(n, space.cells());
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < space.cells(); ++i) f(k - 1, i) = steklov_cell_avg(v.f, i, k, time, space);
    }
    return make_control(time, std::move(s), std::move(g), std::move(f), options);
}

ContinuousControl map_Pn(const DiscreteControl& d) {
    ContinuousControl v;
    v.s = boundary_curve(d.s, d.time);
    auto g = std::make_shared<const std::vector<double>>(d.g);
    const TimeGrid time = d.time;
    v.g = [g, time](double t) {
        const std::size_t k = time.step_containing(t);
        return (*g)[k - 1] + ((*g)[k] - (*g)[k - 1]) / time.tau() * (t - time.node(k - 1));
    };
    auto f = std::make_shared<const Matrix>(d.f);
    auto space = std::make_shared<const SpatialGrid>(d.space);
    v.f = [f, space, time](double x, double t) {
        return (*f)(time.step_containing(t) - 1, space->cell_containing(x));
    };
    return v;
}

namespace {

constexpr double kFeasTol = 1e-12;

// Scales anchor + theta * (v - anchor) so that its norm equals R.
// Returns false if the anchor itself lies outside the ball.
template <typename Dot>
bool shrink_about(std::vector<double>& v, const std::vector<double>& anchor, double R, Dot dot) {
    std::vector<double> d(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) d[k] = v[k] - anchor[k];
    const double A = dot(d, d);
    const double B = dot(anchor, d);
    const double C = dot(anchor, anchor) - R * R;
    double theta = 0.0;
    bool ok = C <= 0.0 && A > 0.0;
    if (ok) theta = std::clamp((-B + std::sqrt(std::max(B * B - A * C, 0.0))) / A, 0.0, 1.0);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = anchor[k] + theta * d[k];
    return ok;
}

} // namespace

Projection project(const DiscreteControl& d, const ProblemData& data, FeasibleSet set) {
    Projection out{d, {}};
    ProjectionReport& rep = out.report;
    const double tau = d.time.tau();
    const double R = data.R;

    std::vector<double> s = d.s;
    for (double& v : s) {
        if (v < data.delta) {
            v = data.delta;
            ++rep.clamped_low;
        } else if (v > d.options.ell) {
            v = d.options.ell;
            ++rep.clamped_high;
        }
    }
    s[0] = data.s0;
    s[1] = data.s0;
    auto b22 = [tau](const std::vector<double>& u, const std::vector<double>& v) { return dot_b22(u, v, tau); };
    if (norm_b22(s, tau) > R * (1.0 + kFeasTol)) {
        rep.scaled_s = true;
        if (!shrink_about(s, std::vector<double>(s.size(), data.s0), R, b22)) rep.anchor_infeasible = true;
    }
    if (s != d.s) out.control = with_boundary(d, s);

    DiscreteControl& c = out.control;
    const double g_compat = data.compatible_flux();
    if (set == FeasibleSet::WRCompat) {
        c.g[0] = g_compat;
        rep.stefan_compat_residual =
            data.chi(data.s0, 0.0) - data.phi.dx(data.s0, 0.0) * data.a(data.s0, 0.0);
    }
    auto b21 = [tau](const std::vector<double>& u, const std::vector<double>& v) { return dot_b21(u, v, tau); };
    if (norm_b21(c.g, tau) > R * (1.0 + kFeasTol)) {
        rep.scaled_g = true;
        std::vector<double> anchor(c.g.size(), g_compat);
        if (norm_b21(anchor, tau) > R) {
            if (set == FeasibleSet::WRCompat) rep.anchor_infeasible = true;
            std::fill(anchor.begin(), anchor.end(), 0.0);
        }
        if (!shrink_about(c.g, anchor, R, b21)) rep.anchor_infeasible = true;
    }

    const double fn = norm_l2(c.f, c.time, c.space);
    if (fn > R * (1.0 + kFeasTol)) {
        rep.scaled_f = true;
        const double theta = R / fn;
        for (double& v : c.f.data()) v *= theta;
    }
    return out;
}

bool is_feasible(const DiscreteControl& d, const ProblemData& data, FeasibleSet set) {
    const Projection p = project(d, data, set);
    return p.control.s == d.s && p.control.g == d.g && p.control.f == d.f;
}

double besov_seminorm_diag(std::span<const double> samples, double spacing, double order) {
    if (samples.size() < 2) throw InvalidArgument("besov seminorm: need at least 2 samples");
    if (!(order > 0.0 && order < 1.0)) throw InvalidArgument("besov seminorm: order must be in (0, 1)");
    double acc = 0.0;
    const double power = 1.0 + 2.0 * order;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = 0; j < samples.size(); ++j) {
            if (i == j) continue;
            const double gap = spacing * std::abs(static_cast<double>(i) - static_cast<double>(j));
            const double diff = samples[i] - samples[j];
            acc += spacing * spacing * diff * diff / std::pow(gap, power);
        }
    }
    return std::sqrt(acc);
}

} // namespace isp
