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

#include "isp/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "isp/error.hpp"

namespace isp {

void SolverConfig::validate() const {
    if (!(A0 > 0.0)) throw InvalidArgument("solver: A0 must be positive");
    if (!(rho > 1.0)) throw InvalidArgument("solver: rho must exceed 1");
    if (outer_iters == 0 || inner_iters == 0) throw InvalidArgument("solver: iteration counts must be positive");
    if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw InvalidArgument("solver: armijo c1 must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("solver: backtrack must lie in (0, 1)");
    if (!(step0 > 0.0)) throw InvalidArgument("solver: step0 must be positive");
    if (!(grad_tol > 0.0) || !(violation_tol > 0.0)) throw InvalidArgument("solver: tolerances must be positive");
}

namespace {

using Blocks = std::array<double, 3>;

Blocks block_dots(const ControlDirection& x, const ControlDirection& y, const DiscreteControl& at) {
    const double tau = at.time.tau();
    Blocks out{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < x.ds.size(); ++k) out[0] += tau * x.ds[k] * y.ds[k];
    for (std::size_t k = 0; k < x.dg.size(); ++k) out[1] += tau * x.dg[k] * y.dg[k];
    for (std::size_t r = 0; r < x.df.rows(); ++r) {
        for (std::size_t i = 0; i < x.df.cols(); ++i) out[2] += tau * at.space.step(i) * x.df(r, i) * y.df(r, i);
    }
    return out;
}

double total(const Blocks& b) { return b[0] + b[1] + b[2]; }

ControlDirection masked_gradient(const GradientVector& g, const std::array<bool, 3>& free) {
    ControlDirection d{g.d_s, g.d_g, g.d_f};
    if (!free[0]) std::fill(d.ds.begin(), d.ds.end(), 0.0);
    if (!free[1]) std::fill(d.dg.begin(), d.dg.end(), 0.0);
    if (!free[2]) std::fill(d.df.data().begin(), d.df.data().end(), 0.0);
    return d;
}

// a - b laid out on b's grid.
ControlDirection difference(const DiscreteControl& a, const DiscreteControl& b) {
    ControlDirection d = zero_direction(b);
    for (std::size_t k = 0; k < d.ds.size(); ++k) d.ds[k] = a.s[k] - b.s[k];
    for (std::size_t k = 0; k < d.dg.size(); ++k) d.dg[k] = a.g[k] - b.g[k];
    const Matrix fa = remap_source(a.f, a.space, b.space);
    for (std::size_t r = 0; r < d.df.rows(); ++r) {
        for (std::size_t i = 0; i < d.df.cols(); ++i) d.df(r, i) = fa(r, i) - b.f(r, i);
    }
    return d;
}

ControlDirection on_grid(const ControlDirection& d, const SpatialGrid& from, const SpatialGrid& to) {
    ControlDirection out = d;
    out.df = remap_source(d.df, from, to);
    return out;
}

// v + alpha * dir with s clamped before the grid is rebuilt, then projected.
DiscreteControl candidate(const DiscreteControl& v, const ControlDirection& dir, double alpha,
                          const ProblemData& data, FeasibleSet set) {
    DiscreteControl moved = v;
    for (std::size_t k = 0; k < moved.g.size(); ++k) moved.g[k] += alpha * dir.dg[k];
    for (std::size_t r = 0; r < moved.f.rows(); ++r) {
        for (std::size_t i = 0; i < moved.f.cols(); ++i) moved.f(r, i) += alpha * dir.df(r, i);
    }
    std::vector<double> s = v.s;
    bool changed = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (dir.ds[k] == 0.0) continue;
        s[k] = std::clamp(s[k] + alpha * dir.ds[k], data.delta, v.options.ell);
        changed = true;
    }
    if (changed) moved = with_boundary(moved, std::move(s));
    return project(moved, data, set).control;
}

struct Point {
    DiscreteControl control;
    CostBreakdown cost;
    ControlDirection grad;
};

Point evaluate_point(const DiscreteControl& v, const ProblemData& data, double A, const std::array<bool, 3>& free) {
    Evaluation ev = evaluate_with_gradient(v, data, A);
    return Point{v, ev.cost, masked_gradient(ev.gradient, free)};
}

} // namespace

MinimizeResult minimize(const DiscreteControl& initial, const ProblemData& data, const SolverConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    MinimizeResult res;
    RunRecord& rec = res.record;
    const Projection proj = project(initial, data, cfg.feasible_set);
    const ProjectionReport& pr = proj.report;
    if (pr.clamped_low || pr.clamped_high || pr.scaled_s || pr.scaled_g || pr.scaled_f) {
        rec.message = "initial control was projected onto the feasible set";
    }
    DiscreteControl v = proj.control;

    for (std::size_t stage = 0; stage < cfg.outer_iters; ++stage) {
        const double A = cfg.A0 * std::pow(cfg.rho, static_cast<double>(stage));
        StageSummary summary;
        summary.A = A;

        Point cur;
        try {
            cur = evaluate_point(v, data, A, cfg.free_blocks);
        } catch (const SingularStepError& e) {
            summary.stop_reason = "aborted";
            rec.stages.push_back(summary);
            rec.status = "aborted";
            rec.message = e.what();
            res.control = v;
            return res;
        }

        // Per-block scaling frozen for the stage.
        const Blocks g0 = block_dots(cur.grad, cur.grad, cur.control);
        Blocks kappa{};
        for (int b = 0; b < 3; ++b) kappa[b] = g0[b] > 0.0 ? 1.0 / std::sqrt(g0[b]) : 0.0;

        rec.iterations.push_back({stage, 0, cur.cost, 0.0, std::sqrt(total(g0)), cur.cost.constraint_violation,
                                  elapsed()});

        double alpha = cfg.step0;
        std::size_t it = 0;
        summary.stop_reason = "inner_iters";
        while (it < cfg.inner_iters) {
            const Blocks gg = block_dots(cur.grad, cur.grad, cur.control);
            if (total(gg) <= cfg.grad_tol) {
                summary.stop_reason = "grad_tol";
                break;
            }
            ControlDirection dir = cur.grad;
            for (double& x : dir.ds) x *= -kappa[0];
            for (double& x : dir.dg) x *= -kappa[1];
            for (double& x : dir.df.data()) x *= -kappa[2];

            bool accepted = false;
            Point next;
            double lin = 0.0;
            for (std::size_t bt = 0; bt <= cfg.max_backtracks; ++bt, alpha *= cfg.backtrack) {
                try {
                    DiscreteControl trial = candidate(cur.control, dir, alpha, data, cfg.feasible_set);
                    const ControlDirection delta = difference(trial, cur.control);
                    lin = total(block_dots(cur.grad, delta, cur.control));
                    if (!(lin < 0.0)) continue;
                    const StateTrajectory traj = forward_solve(trial, data);
                    const CostBreakdown c = cost_discrete(traj, trial, data, A);
                    if (!std::isfinite(c.total) || c.total > cur.cost.total + cfg.armijo_c1 * lin) continue;
                    next = evaluate_point(trial, data, A, cfg.free_blocks);
                    accepted = true;
                    break;
                } catch (const SingularStepError&) {
                } catch (const GridCouplingViolation&) {
                } catch (const ConstraintViolation&) {
                }
            }
            if (!accepted) {
                summary.stop_reason = "stalled";
                break;
            }
            ++it;

            // Barzilai-Borwein length in the block-scaled metric for the next trial.
            const ControlDirection dv = difference(next.control, cur.control);
            const ControlDirection gn = on_grid(next.grad, next.control.space, cur.control.space);
            ControlDirection dg = gn;
            for (std::size_t k = 0; k < dg.ds.size(); ++k) dg.ds[k] -= cur.grad.ds[k];
            for (std::size_t k = 0; k < dg.dg.size(); ++k) dg.dg[k] -= cur.grad.dg[k];
            for (std::size_t j = 0; j < dg.df.data().size(); ++j) dg.df.data()[j] -= cur.grad.df.data()[j];
            const Blocks ss = block_dots(dv, dv, cur.control);
            const double sy = total(block_dots(dv, dg, cur.control));
            double ss_scaled = 0.0;
            for (int b = 0; b < 3; ++b) {
                if (kappa[b] > 0.0) ss_scaled += ss[b] / kappa[b];
            }
            const double accepted_alpha = alpha;
            alpha = sy > 0.0 ? ss_scaled / sy : 2.0 * alpha;
            alpha = std::min(alpha, 1e8 * cfg.step0);

            const double drop = cur.cost.total - next.cost.total;
            cur = std::move(next);
            rec.iterations.push_back({stage, it, cur.cost, accepted_alpha,
                                      std::sqrt(total(block_dots(cur.grad, cur.grad, cur.control))),
                                      cur.cost.constraint_violation, elapsed()});
            if (drop <= 1e-15 * std::abs(cur.cost.total)) {
                summary.stop_reason = "stalled";
                break;
            }
        }
        v = cur.control;
        summary.iterations = it;
        summary.cost = cur.cost;
        summary.violation = cur.cost.constraint_violation;
        rec.stages.push_back(summary);
        if (summary.violation <= cfg.violation_tol) {
            rec.converged = true;
            break;
        }
    }
    rec.status = rec.converged ? "converged" : "stages_exhausted";
    res.control = v;
    return res;
}

} // namespace isp
