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

#include "isp/forward.hpp"

#include <algorithm>
#include <cmath>

#include "isp/error.hpp"
#include "isp/quadrature.hpp"

namespace isp {

SchemeCoefficients compute_coefficients(const DiscreteControl& control, const ProblemData& data) {
    const TimeGrid& time = control.time;
    const SpatialGrid& space = control.space;
    const std::size_t n = time.steps();
    const std::size_t N = space.cells();
    SchemeCoefficients co;
    co.a = Matrix(n, N);
    co.b = Matrix(n, N);
    co.c = Matrix(n, N);
    co.flux.resize(n);
    co.latent.resize(n);
    co.chi.resize(n);
    const Curve sn = boundary_curve(control.s, time);
    for (std::size_t k = 1; k <= n; ++k) {
        // Only the cells left of the boundary enter step k.
        const std::size_t m = space.active(k);
        for (std::size_t i = 0; i < m; ++i) {
            co.a(k - 1, i) = steklov_cell_avg(data.a, i, k, time, space);
            co.b(k - 1, i) = steklov_cell_avg(data.b, i, k, time, space);
            co.c(k - 1, i) = steklov_cell_avg(data.c, i, k, time, space);
        }
        // g^n is linear on the step, so its mean is the mid value.
        co.flux[k - 1] = 0.5 * (control.g[k - 1] + control.g[k]);
        co.latent[k - 1] = steklov_trace_avg(TraceKind::LatentFlux, data.gamma, sn, k, time);
        co.chi[k - 1] = steklov_trace_avg(TraceKind::Value, data.chi, sn, k, time);
    }
    return co;
}

TridiagonalSystem assemble_step(std::size_t k, std::span<const double> prev, const DiscreteControl& control,
                                const SchemeCoefficients& co) {
    const SpatialGrid& space = control.space;
    const double tau = control.time.tau();
    const std::size_t m = space.active(k);
    const std::size_t r = k - 1;
    TridiagonalSystem sys(m + 1);

    const double h = space.step(0);
    {
        const double a = co.a(r, 0);
        const double b = co.b(r, 0);
        const double c = co.c(r, 0);
        sys.diag[0] = a + h * b - h * h * c + h * h / tau;
        sys.sup[0] = -(a + h * b);
        sys.rhs[0] = h * h / tau * prev[0] - h * h * control.f(r, 0) - h * co.flux[r];
        sys.scale[0] = h;
    }
    for (std::size_t i = 1; i < m; ++i) {
        const double hi = space.step(i);
        const double hl = space.step(i - 1);
        const double al = co.a(r, i - 1);
        const double a = co.a(r, i);
        const double b = co.b(r, i);
        const double c = co.c(r, i);
        const double mass = hi * hi * hl / tau;
        sys.sub[i] = -al * hi;
        sys.diag[i] = al * hi + a * hl + b * hi * hl - c * hi * hi * hl + mass;
        sys.sup[i] = -(a * hl + b * hi * hl);
        sys.rhs[i] = -hi * hi * hl * control.f(r, i) + mass * prev[i];
        sys.scale[i] = hi * hl;
    }
    {
        const double hl = space.step(m - 1);
        const double al = co.a(r, m - 1);
        sys.sub[m] = -al;
        sys.diag[m] = al;
        sys.rhs[m] = -hl * (co.latent[r] - co.chi[r]);
        sys.scale[m] = hl;
    }
    return sys;
}

TridiagonalSystem assemble_step(std::size_t k, std::span<const double> prev, const DiscreteControl& control,
                                const ProblemData& data) {
    return assemble_step(k, prev, control, compute_coefficients(control, data));
}

std::vector<double> solve_step(const TridiagonalSystem& sys, std::size_t level) {
    return solve_tridiagonal(sys, level).x;
}

namespace {

double interpolate_active(std::span<const double> row, const SpatialGrid& space, std::size_t m, double x) {
    const std::size_t j = std::min(space.cell_containing(x), m - 1);
    const double xa = space.x(j);
    const double w = (x - xa) / space.step(j);
    return row[j] + w * (row[j + 1] - row[j]);
}

} // namespace

void extend_by_reflection(std::span<double> row, const SpatialGrid& space, std::size_t m) {
    const double boundary = space.x(m);
    for (std::size_t i = m + 1; i < row.size(); ++i) {
        row[i] = interpolate_active(row, space, m, reflect(space.x(i), boundary).point);
    }
}

double StateTrajectory::hat(double x, std::size_t k) const {
    const std::size_t m = active(k);
    std::span<const double> row(u.row(k), u.cols());
    return interpolate_active(row, space, m, reflect(x, space.x(m)).point);
}

StateTrajectory forward_solve(const DiscreteControl& control, const ProblemData& data) {
    StateTrajectory traj;
    traj.time = control.time;
    traj.space = control.space;
    traj.s = control.s;
    const std::size_t n = control.time.steps();
    const std::size_t nodes = control.space.cells() + 1;
    traj.u = Matrix(n + 1, nodes);
    auto co = std::make_shared<SchemeCoefficients>(compute_coefficients(control, data));

    const std::size_t m_init = control.space.active(0);
    for (std::size_t i = 0; i <= m_init; ++i) traj.u(0, i) = data.phi_at(control.space.x(i));
    extend_by_reflection(std::span<double>(traj.u.row(0), nodes), control.space, m_init);

    for (std::size_t k = 1; k <= n; ++k) {
        const TridiagonalSystem sys =
            assemble_step(k, std::span<const double>(traj.u.row(k - 1), nodes), control, *co);
        const TridiagonalSolution sol = solve_tridiagonal(sys, k);
        traj.max_residual = std::max(traj.max_residual, sol.residual);
        std::copy(sol.x.begin(), sol.x.end(), traj.u.row(k));
        extend_by_reflection(std::span<double>(traj.u.row(k), nodes), control.space, control.space.active(k));
    }
    traj.coeffs = std::move(co);
    return traj;
}

Interpolants interpolants(std::shared_ptr<const StateTrajectory> traj) {
    auto check = [traj](double x, double t, bool allow_late) {
        const double ell = traj->space.ell();
        const double T = traj->time.final_time();
        const double tol = 1e-12 * std::max(1.0, std::max(ell, T));
        if (x < -tol || x > ell + tol || t < -tol || (!allow_late && t > T + tol)) {
            throw DomainError("trajectory interpolant evaluated outside D");
        }
    };
    Interpolants out;
    out.u_tau = [traj, check](double x, double t) {
        check(x, t, false);
        const std::size_t k = t <= 0.0 ? 0 : traj->time.step_containing(t);
        return traj->hat(x, k);
    };
    out.u_hat_tau = [traj, check](double x, double t) {
        check(x, t, true);
        const TimeGrid& time = traj->time;
        if (t >= time.final_time()) return traj->hat(x, time.steps());
        if (t <= 0.0) return traj->hat(x, 0);
        const std::size_t k = time.step_containing(t);
        const double lo = traj->hat(x, k - 1);
        const double hi = traj->hat(x, k);
        return lo + (hi - lo) / time.tau() * (t - time.node(k - 1));
    };
    out.u_tilde_tau = [traj, check](double x, double t) {
        check(x, t, false);
        const std::size_t k = traj->time.step_containing(t);
        return traj->u(k, traj->space.cell_containing(x));
    };
    return out;
}

EnergyReport energy_diagnostics(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data) {
    const TimeGrid& time = traj.time;
    const SpatialGrid& space = traj.space;
    const std::size_t n = time.steps();
    const std::size_t N = space.cells();
    const double tau = time.tau();
    EnergyReport rep;

    for (std::size_t k = 0; k <= n; ++k) {
        double mass = 0.0;
        double grad = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double h = space.step(i);
            const double ux = (traj.u(k, i + 1) - traj.u(k, i)) / h;
            mass += h * traj.u(k, i) * traj.u(k, i);
            grad += h * ux * ux;
        }
        rep.mass_max = std::max(rep.mass_max, mass);
        if (k >= 1) rep.dissipation += tau * grad;
    }
    rep.lhs = rep.mass_max + rep.dissipation;

    for (std::size_t i = 0; i < space.active(0); ++i) {
        const double p = data.phi_at(space.x(i));
        rep.phi_norm2 += space.step(i) * p * p;
    }
    for (std::size_t k = 1; k <= n; ++k) {
        const double g0 = control.g[k - 1];
        const double g1 = control.g[k];
        rep.g_norm2 += tau * (g0 * g0 + g0 * g1 + g1 * g1) / 3.0;
    }
    const double fn = norm_l2(control.f, time, space);
    rep.f_norm2 = fn * fn;
    const Curve sn = boundary_curve(control.s, time);
    for (std::size_t k = 1; k <= n; ++k) {
        const double ta = time.node(k - 1);
        const double tb = time.node(k);
        rep.latent_norm2 += quad::integrate(
            [&](double t) {
                const double v = data.gamma(sn.value(t), t) * sn.slope(t);
                return v * v;
            },
            ta, tb);
        rep.chi_norm2 += quad::integrate(
            [&](double t) {
                const double v = data.chi(sn.value(t), t);
                return v * v;
            },
            ta, tb);
    }
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        if (!(control.s[k + 1] > control.s[k])) continue;
        for (std::size_t i = space.active(k); i < space.active(k + 1); ++i) {
            rep.growth_term += space.step(i) * traj.u(k, i) * traj.u(k, i);
        }
    }
    rep.rhs = rep.phi_norm2 + rep.g_norm2 + rep.f_norm2 + rep.latent_norm2 + rep.chi_norm2 + rep.growth_term;
    if (rep.rhs > 0.0) {
        rep.ratio = rep.lhs / rep.rhs;
    } else {
        rep.ratio = rep.lhs > 0.0 ? HUGE_VAL : 0.0;
    }

    // ũ is u on the active nodes and frozen at the boundary value beyond.
    auto tilde = [&](std::size_t k, std::size_t i) {
        const std::size_t m = space.active(k);
        return traj.u(k, std::min(i, m));
    };
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t m = space.active(k);
        double grad = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double h = space.step(i);
            const double ux = (tilde(k, i + 1) - tilde(k, i)) / h;
            const double ux_prev = (tilde(k - 1, i + 1) - tilde(k - 1, i)) / h;
            const double ut = (tilde(k, i) - tilde(k - 1, i)) / tau;
            const double uxt = (ux - ux_prev) / tau;
            grad += h * ux * ux;
            rep.see_time_sum += tau * h * ut * ut;
            rep.see_mixed_sum += tau * tau * h * uxt * uxt;
        }
        rep.see_gradient_max = std::max(rep.see_gradient_max, grad);
    }
    return rep;
}

} // namespace isp
