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

#include "isp/adjoint.hpp"

#include <algorithm>
#include <cmath>

#include "isp/error.hpp"
#include "isp/quadrature.hpp"

namespace isp {

namespace {

// Boundary slope seen by the backward step k: the growth of the active
// domain between level k and level k+1. The last step has no successor.
double transfer_slope(const std::vector<double>& s, std::size_t k, double tau) {
    if (k + 1 >= s.size()) return 0.0;
    return (s[k + 1] - s[k]) / tau;
}

// Coefficients of s_k, s_{k-1}, s_{k-2} in s^n(t) and (s^n)'(t) on step k >= 2.
struct BasisAt {
    double v[3];
    double d[3];
};

BasisAt boundary_basis(double r, double tau) {
    const double q = r / tau;
    BasisAt b{};
    b.v[0] = 0.5 * q * q;
    b.v[1] = 1.0 + (q - 0.5) - q * q;
    b.v[2] = -(q - 0.5) + 0.5 * q * q;
    b.d[0] = q / tau;
    b.d[1] = (1.0 - 2.0 * q) / tau;
    b.d[2] = (q - 1.0) / tau;
    return b;
}

// One-sided derivative at node m from nodes m, m-1, m-2.
double one_sided_dx(const Matrix& u, std::size_t k, const SpatialGrid& space, std::size_t m) {
    const double h1 = space.step(m - 1);
    if (m < 2) return (u(k, m) - u(k, m - 1)) / h1;
    const double h2 = space.step(m - 2);
    return u(k, m) * (1.0 / h1 + 1.0 / (h1 + h2)) - u(k, m - 1) * (h1 + h2) / (h1 * h2) +
           u(k, m - 2) * h1 / (h2 * (h1 + h2));
}

} // namespace

TridiagonalSystem assemble_adjoint_step(std::size_t k, std::span<const double> next, const StateTrajectory& traj,
                                        const DiscreteControl& control, const ProblemData& data,
                                        const Measurements& meas, double A) {
    const SpatialGrid& space = control.space;
    const SchemeCoefficients& co = *traj.coeffs;
    const double tau = control.time.tau();
    const std::size_t m = space.active(k);
    const std::size_t r = k - 1;
    TridiagonalSystem sys(m + 1);

    auto over = [&](std::size_t i) { return subplus(traj.u(k, i) - data.u_star); };

    {
        const double h = space.step(0);
        const double a = co.a(r, 0);
        const double b = co.b(r, 0);
        const double c = co.c(r, 0);
        sys.diag[0] = a + h * b - h * h * c + h * h / tau;
        sys.sup[0] = -a;
        sys.rhs[0] = h * h / tau * next[0] + 2.0 * A * h * h * over(0);
        sys.scale[0] = h;
    }
    for (std::size_t i = 1; i < m; ++i) {
        const double hi = space.step(i);
        const double hl = space.step(i - 1);
        const double al = co.a(r, i - 1);
        const double bl = co.b(r, i - 1);
        const double a = co.a(r, i);
        const double b = co.b(r, i);
        const double c = co.c(r, i);
        const double mass = hi * hi * hl / tau;
        sys.sub[i] = -(al * hi + bl * hi * hl);
        sys.diag[i] = al * hi + a * hl + b * hi * hl - c * hi * hi * hl + mass;
        sys.sup[i] = -a * hl;
        sys.rhs[i] = mass * next[i] + 2.0 * A * hi * hi * hl * over(i);
        sys.scale[i] = hi * hl;
    }
    {
        const double hl = space.step(m - 1);
        const double al = co.a(r, m - 1);
        const double bl = co.b(r, m - 1);
        const double sp = transfer_slope(control.s, k, tau);
        sys.sub[m] = -(al + bl * hl);
        sys.diag[m] = al - hl * sp;
        sys.rhs[m] = 2.0 * data.beta1 * hl * (traj.u(k, m) - meas.mu[r]);
        sys.scale[m] = hl;
    }
    return sys;
}

AdjointTrajectory adjoint_solve(const StateTrajectory& traj, const DiscreteControl& control, const ProblemData& data,
                                double A) {
    const TimeGrid& time = control.time;
    const SpatialGrid& space = control.space;
    const std::size_t n = time.steps();
    const std::size_t nodes = space.cells() + 1;
    const Measurements meas = sample_measurements(time, space, data);

    AdjointTrajectory adj;
    adj.time = time;
    adj.space = space;
    adj.psi = Matrix(n + 1, nodes);
    adj.source = Matrix(n + 1, nodes);
    adj.active.assign(n + 1, 0);

    const std::size_t mn = space.active(n);
    for (std::size_t i = 0; i < mn; ++i) adj.psi(n, i) = 2.0 * data.beta0 * (traj.u(n, i) - meas.w[i]);
    adj.psi(n, mn) = 2.0 * data.beta0 * (traj.u(n, mn) - data.w_at(space.x(mn)));
    adj.active[n] = mn;
    extend_by_reflection(std::span<double>(adj.psi.row(n), nodes), space, mn);

    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < space.active(k); ++i) {
            adj.source(k, i) = -2.0 * A * subplus(traj.u(k, i) - data.u_star);
        }
    }

    for (std::size_t k = n; k >= 1; --k) {
        const TridiagonalSystem sys =
            assemble_adjoint_step(k, std::span<const double>(adj.psi.row(k), nodes), traj, control, data, meas, A);
        const TridiagonalSolution sol = solve_tridiagonal(sys, k);
        adj.max_residual = std::max(adj.max_residual, sol.residual);
        std::copy(sol.x.begin(), sol.x.end(), adj.psi.row(k - 1));
        adj.active[k - 1] = space.active(k);
        extend_by_reflection(std::span<double>(adj.psi.row(k - 1), nodes), space, space.active(k));
    }
    return adj;
}

ControlDirection zero_direction(const DiscreteControl& control) {
    ControlDirection d;
    d.ds.assign(control.s.size(), 0.0);
    d.dg.assign(control.g.size(), 0.0);
    d.df = Matrix(control.f.rows(), control.f.cols());
    return d;
}

double pairing(const GradientVector& grad, const ControlDirection& dir, const DiscreteControl& control) {
    const double tau = control.time.tau();
    double acc = 0.0;
    for (std::size_t k = 0; k < grad.d_s.size(); ++k) acc += tau * grad.d_s[k] * dir.ds[k];
    for (std::size_t k = 0; k < grad.d_g.size(); ++k) acc += tau * grad.d_g[k] * dir.dg[k];
    for (std::size_t r = 0; r < grad.d_f.rows(); ++r) {
        for (std::size_t i = 0; i < grad.d_f.cols(); ++i) {
            acc += tau * control.space.step(i) * grad.d_f(r, i) * dir.df(r, i);
        }
    }
    return acc;
}

double gradient_norm2(const GradientVector& grad, const DiscreteControl& control) {
    ControlDirection self{grad.d_s, grad.d_g, grad.d_f};
    return pairing(grad, self, control);
}

GradientVector assemble_gradient(const StateTrajectory& traj, const AdjointTrajectory& adj,
                                 const DiscreteControl& control, const ProblemData& data, double A) {
    const TimeGrid& time = control.time;
    const SpatialGrid& space = control.space;
    const std::size_t n = time.steps();
    const std::size_t N = space.cells();
    const double tau = time.tau();
    const Measurements meas = sample_measurements(time, space, data);

    GradientVector grad;
    grad.d_f = Matrix(n, N);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < space.active(k); ++i) grad.d_f(k - 1, i) = -adj.psi(k - 1, i);
    }

    grad.d_g.assign(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        double acc = 0.0;
        if (j >= 1) acc += adj.psi(j - 1, 0);
        if (j + 1 <= n) acc += adj.psi(j, 0);
        grad.d_g[j] = -0.5 * acc;
    }

    // Collect d I / d s_j, then divide by tau for the time pairing.
    std::vector<double> dI(n + 1, 0.0);
    const Curve sn = boundary_curve(control.s, time);
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t m = space.active(k);
        const double psi_b = adj.psi(k - 1, m);

        // The boundary row carries psi_m * (latent - chi); differentiate
        // through s^n on the step.
        if (k >= 2) {
            const double ta = time.node(k - 1);
            for (int p = 0; p < 3; ++p) {
                const double part = quad::integrate(
                    [&](double t) {
                        const double x = sn.value(t);
                        const double sp = sn.slope(t);
                        const BasisAt bas = boundary_basis(t - ta, tau);
                        return data.gamma.dx(x, t) * sp * bas.v[p] + data.gamma(x, t) * bas.d[p] -
                               data.chi.dx(x, t) * bas.v[p];
                    },
                    ta, time.node(k), 2);
                dI[k - p] += -psi_b * part;
            }
        }

        // Terms from moving the boundary node at level k.
        const double ux = one_sided_dx(traj.u, k, space, m);
        // (a u_x)_x at the boundary from the state equation, with u_t taken
        // along the boundary trace.
        const double u_b = traj.u(k, m);
        const double u_prev = traj.u(k - 1, space.active(k - 1));
        const double slope = (control.s[k] - control.s[k - 1]) / tau;
        const double u_t = (u_b - u_prev) / tau - ux * slope;
        const double div = u_t + control.f(k - 1, m - 1) - traj.coeffs->b(k - 1, m - 1) * ux -
                           traj.coeffs->c(k - 1, m - 1) * u_b;
        const double miss = traj.u(k, m) - meas.mu[k - 1];
        const double over = subplus(traj.u(k, m) - data.u_star);
        dI[k] += tau * (2.0 * data.beta1 * miss * ux - psi_b * div + A * over * over);
    }
    {
        const std::size_t m = space.active(n);
        const double d = traj.u(n, m) - data.w_at(space.x(m));
        dI[n] += data.beta0 * d * d + 2.0 * data.beta2 * (control.s[n] - data.s_star);
    }
    grad.d_s.assign(n + 1, 0.0);
    for (std::size_t k = 2; k <= n; ++k) grad.d_s[k] = dI[k] / tau;
    return grad;
}

Evaluation evaluate_with_gradient(const DiscreteControl& control, const ProblemData& data, double A) {
    Evaluation ev;
    ev.state = forward_solve(control, data);
    ev.cost = cost_discrete(ev.state, control, data, A);
    ev.adjoint = adjoint_solve(ev.state, control, data, A);
    ev.gradient = assemble_gradient(ev.state, ev.adjoint, control, data, A);
    return ev;
}

DiscreteControl perturb(const DiscreteControl& control, const ControlDirection& dir, double eps) {
    DiscreteControl out = control;
    for (std::size_t k = 0; k < out.g.size(); ++k) out.g[k] += eps * dir.dg[k];
    for (std::size_t r = 0; r < out.f.rows(); ++r) {
        for (std::size_t i = 0; i < out.f.cols(); ++i) out.f(r, i) += eps * dir.df(r, i);
    }
    bool moved = false;
    std::vector<double> s = out.s;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (dir.ds[k] != 0.0) moved = true;
        s[k] += eps * dir.ds[k];
    }
    if (!moved) return out;
    return with_boundary(out, std::move(s));
}

std::vector<FdPairing> fd_gradient_oracle(const DiscreteControl& control, const ProblemData& data, double A,
                                          double eps, const std::vector<ControlDirection>& directions) {
    if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    std::vector<FdPairing> out;
    out.reserve(directions.size());
    for (const ControlDirection& dir : directions) {
        const DiscreteControl plus = perturb(control, dir, eps);
        const DiscreteControl minus = perturb(control, dir, -eps);
        const double jp = cost_discrete(forward_solve(plus, data), plus, data, A).total;
        const double jm = cost_discrete(forward_solve(minus, data), minus, data, A).total;
        FdPairing p;
        p.value = (jp - jm) / (2.0 * eps);
        p.topology_changed = plus.cells() != minus.cells() || plus.cells() != control.cells();
        out.push_back(p);
    }
    return out;
}

OptimalityReport check_optimality(const GradientVector& grad, const DiscreteControl& control,
                                  const std::vector<DiscreteControl>& candidates, double tol) {
    OptimalityReport rep;
    rep.min_pairing = HUGE_VAL;
    for (const DiscreteControl& cand : candidates) {
        ControlDirection d = zero_direction(control);
        for (std::size_t k = 0; k < d.ds.size(); ++k) d.ds[k] = cand.s[k] - control.s[k];
        for (std::size_t k = 0; k < d.dg.size(); ++k) d.dg[k] = cand.g[k] - control.g[k];
        const Matrix f = cand.space.same_nodes(control.space) ? cand.f
                                                              : remap_source(cand.f, cand.space, control.space);
        for (std::size_t r = 0; r < d.df.rows(); ++r) {
            for (std::size_t i = 0; i < d.df.cols(); ++i) d.df(r, i) = f(r, i) - control.f(r, i);
        }
        const double v = pairing(grad, d, control);
        rep.pairings.push_back(v);
        rep.min_pairing = std::min(rep.min_pairing, v);
    }
    if (candidates.empty()) rep.min_pairing = 0.0;
    rep.optimal = rep.min_pairing >= -tol;
    return rep;
}

} // namespace isp
