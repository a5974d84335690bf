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

#include "isp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "isp/adjoint.hpp"
#include "isp/error.hpp"
#include "isp/forward.hpp"
#include "isp/io.hpp"
#include "isp/objective.hpp"
#include "isp/optimizer.hpp"

namespace isp::cli {

namespace fs = std::filesystem;
using io::json;

std::optional<RunSpec> parse_args(int argc, const char* const* argv, int& exit_code) {
    CLI::App app{"Inverse Stefan problem solver"};
    RunSpec spec;
    app.add_option("command", spec.command, "forward | invert | grad-check | norms | synth")
        ->required()
        ->check(CLI::IsMember({"forward", "invert", "grad-check", "norms", "synth"}));
    app.add_option("--problem", spec.problem, "problem JSON")->required();
    app.add_option("--control", spec.control, "control JSON");
    app.add_option("--out", spec.out, "output directory");
    app.add_option("--n", spec.n, "time steps");
    app.add_option("--m0", spec.m0, "cells on [0, min s]");
    app.add_option("--seed", spec.seed, "noise seed");
    app.add_option("--noise", spec.noise, "relative noise level for synth")->check(CLI::NonNegativeNumber);
    app.add_option("--stages", spec.stages, "penalty stages");
    app.add_option("--component", spec.component, "grad-check block")
        ->check(CLI::IsMember({"s", "g", "f", "all"}));
    app.add_option("--eps", spec.eps, "finite-difference step")->check(CLI::Range(1e-8, 1e-3));
    app.add_option("--refine", spec.refine, "forward: refinement levels against the exact solution");
    app.add_flag("--timing", spec.timing, "record wall time in the run log");
    app.add_option("--inner", spec.inner, "inner iterations per stage");
    app.add_option("--A0", spec.A0, "initial penalty weight");
    app.add_option("--rho", spec.rho, "penalty growth factor");
    app.add_option("--grad-tol", spec.grad_tol, "stationarity tolerance");
    app.add_option("--violation-tol", spec.violation_tol, "constraint violation tolerance");
    app.add_option("--free", spec.free_blocks, "blocks the optimizer may change, e.g. sgf or g");
    app.add_option("--set", spec.feasible_set, "feasible set")->check(CLI::IsMember({"vr", "wr"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        exit_code = rc == 0 ? kOk : kUsage;
        return std::nullopt;
    }
    exit_code = kOk;
    return spec;
}

namespace {

struct Context {
    io::ProblemFile problem;
    json problem_json;
    json control_json;
    DiscreteControl control;
    std::size_t n = 0;
    std::size_t m0 = 0;
    std::string hash;
    fs::path out;
};

Context load(const RunSpec& spec, bool need_control) {
    Context ctx;
    const fs::path ppath = spec.problem;
    ctx.problem_json = io::read_json(ppath);
    ctx.problem = io::problem_from_json(ctx.problem_json, ppath.parent_path());
    ctx.n = spec.n.value_or(ctx.problem.n);
    ctx.m0 = spec.m0.value_or(ctx.problem.m0);
    if (!spec.control.empty()) {
        const fs::path cpath = spec.control;
        ctx.control_json = io::read_json(cpath);
        ctx.control = io::control_from_json(ctx.control_json, ctx.problem, ctx.n, ctx.m0, cpath.parent_path());
        ctx.n = ctx.control.steps();
        ctx.m0 = ctx.control.options.m0;
    } else if (need_control) {
        throw IoError(spec.command + " needs --control");
    } else {
        ctx.control = io::default_control(ctx.problem, ctx.n, ctx.m0);
    }
    json cfg{{"command", spec.command},     {"problem", ctx.problem_json}, {"control", ctx.control_json},
             {"n", ctx.n},                  {"m0", ctx.m0},                {"seed", spec.seed},
             {"noise", spec.noise},         {"component", spec.component}, {"eps", spec.eps},
             {"refine", spec.refine},       {"free", spec.free_blocks},    {"set", spec.feasible_set}};
    if (spec.stages) cfg["stages"] = *spec.stages;
    if (spec.inner) cfg["inner"] = *spec.inner;
    if (spec.A0) cfg["A0"] = *spec.A0;
    if (spec.rho) cfg["rho"] = *spec.rho;
    if (spec.grad_tol) cfg["grad_tol"] = *spec.grad_tol;
    if (spec.violation_tol) cfg["violation_tol"] = *spec.violation_tol;
    ctx.hash = io::fnv1a_hex(cfg.dump());
    ctx.out = spec.out;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw IoError("cannot create " + ctx.out.string() + ": " + ec.message());
    return ctx;
}

json provenance(const Context& ctx, const DiscreteControl& c) {
    return json{{"config_hash", ctx.hash},
                {"n", c.steps()},
                {"m0", c.options.m0},
                {"cells", c.cells()},
                {"T", c.time.final_time()},
                {"ell", c.options.ell}};
}

std::string provenance_line(const Context& ctx, const DiscreteControl& c) {
    std::ostringstream s;
    s << "config_hash=" << ctx.hash << " n=" << c.steps() << " m0=" << c.options.m0 << " cells=" << c.cells();
    return s.str();
}

double max_error(const StateTrajectory& traj, const Field& exact) {
    double err = 0.0;
    for (std::size_t k = 0; k <= traj.time.steps(); ++k) {
        for (std::size_t i = 0; i <= traj.active(k); ++i) {
            err = std::max(err, std::abs(traj.u(k, i) - exact(traj.space.x(i), traj.time.node(k))));
        }
    }
    return err;
}

SolverConfig solver_config(const RunSpec& spec) {
    SolverConfig cfg;
    if (spec.stages) cfg.outer_iters = *spec.stages;
    if (spec.inner) cfg.inner_iters = *spec.inner;
    if (spec.A0) cfg.A0 = *spec.A0;
    if (spec.rho) cfg.rho = *spec.rho;
    if (spec.grad_tol) cfg.grad_tol = *spec.grad_tol;
    if (spec.violation_tol) cfg.violation_tol = *spec.violation_tol;
    cfg.feasible_set = spec.feasible_set == "wr" ? FeasibleSet::WRCompat : FeasibleSet::VR;
    cfg.free_blocks = {false, false, false};
    for (char c : spec.free_blocks) {
        if (c == 's') cfg.free_blocks[0] = true;
        else if (c == 'g') cfg.free_blocks[1] = true;
        else if (c == 'f') cfg.free_blocks[2] = true;
        else throw InvalidArgument(std::string("unknown control block '") + c + "'");
    }
    return cfg;
}

} // namespace

std::vector<double> gaussian_samples(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<double> out;
    out.reserve(count + 1);
    while (out.size() < count) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double th = 2.0 * M_PI * uniform();
        out.push_back(r * std::cos(th));
        out.push_back(r * std::sin(th));
    }
    out.resize(count);
    return out;
}

int cmd_forward(const RunSpec& spec) {
    Context ctx = load(spec, false);
    const ProblemData& data = ctx.problem.data;
    const StateTrajectory traj = forward_solve(ctx.control, data);
    const EnergyReport energy = energy_diagnostics(traj, ctx.control, data);
    const CostBreakdown cost = cost_discrete(traj, ctx.control, data, 1.0);
    io::write_trajectory_csv(ctx.out / "trajectory.csv", traj, provenance_line(ctx, ctx.control));
    json side{{"provenance", provenance(ctx, ctx.control)},
              {"max_residual", traj.max_residual},
              {"cost", io::cost_to_json(cost)},
              {"energy", io::energy_to_json(energy)},
              {"s", ctx.control.s},
              {"active", traj.space.active_counts()},
              {"nodes", traj.space.nodes()}};

    if (spec.refine > 0) {
        if (!ctx.problem_json.contains("exact")) throw IoError("--refine needs an 'exact' field in the problem");
        if (ctx.control_json.is_null()) throw IoError("--refine needs a control given by field specs");
        Field exact = io::field_from_json(ctx.problem_json.at("exact"), fs::path(spec.problem).parent_path());
        exact.set_domain(data.domain());
        std::ostringstream csv;
        csv << "# " << provenance_line(ctx, ctx.control) << "\n" << "n,m0,max_error\n";
        json table = json::array();
        std::size_t n = ctx.n;
        std::size_t m0 = ctx.m0;
        for (std::size_t level = 0; level <= spec.refine; ++level) {
            json cj = ctx.control_json;
            cj.erase("m0");
            const DiscreteControl c = io::control_from_json(cj, ctx.problem, n, m0, fs::path(spec.control).parent_path());
            const double err = max_error(forward_solve(c, data), exact);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", n, m0, err);
            csv << buf;
            table.push_back({{"n", n}, {"m0", m0}, {"max_error", err}});
            std::printf("n=%zu m0=%zu max_error=%.6e\n", n, m0, err);
            n *= 4;
            m0 *= 2;
        }
        io::write_text(ctx.out / "refinement.csv", csv.str());
        side["refinement"] = table;
    }
    io::write_json(ctx.out / "trajectory.json", side);
    std::printf("forward: n=%zu cells=%zu cost=%.6e energy_ratio=%.4f\n", ctx.control.steps(), ctx.control.cells(),
                cost.total, energy.ratio);
    return kOk;
}

int cmd_synth(const RunSpec& spec) {
    Context ctx = load(spec, true);
    io::ProblemFile prob = ctx.problem;
    const DiscreteControl& truth = ctx.control;
    const StateTrajectory traj = forward_solve(truth, prob.data);
    const std::size_t n = truth.steps();
    const std::size_t nodes = truth.cells() + 1;

    std::vector<double> w(nodes);
    for (std::size_t i = 0; i < nodes; ++i) w[i] = traj.u(n, i);
    std::vector<double> mu(n + 1);
    for (std::size_t k = 0; k <= n; ++k) mu[k] = traj.u(k, traj.active(k));

    auto rms = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double sigma_w = spec.noise * rms(w);
    const double sigma_mu = spec.noise * rms(mu);
    constexpr double kClip = 4.0;
    if (spec.noise > 0.0) {
        const std::vector<double> z = gaussian_samples(spec.seed, nodes + n + 1);
        for (std::size_t i = 0; i < nodes; ++i) w[i] += sigma_w * std::clamp(z[i], -kClip, kClip);
        for (std::size_t k = 0; k <= n; ++k) mu[k] += sigma_mu * std::clamp(z[nodes + k], -kClip, kClip);
    }

    prob.data.w = Field::tabulated(truth.space.nodes(), {prob.data.T}, w, Interpolation::Step);
    prob.data.mu = Field::tabulated({0.0}, truth.time.nodes(), mu, Interpolation::Step);
    prob.data.s_star = truth.s[n];
    prob.n = n;
    prob.m0 = truth.options.m0;

    json pj = io::problem_to_json(prob);
    if (ctx.problem_json.contains("exact")) pj["exact"] = ctx.problem_json.at("exact");
    pj["provenance"] = provenance(ctx, truth);
    const json meta{{"provenance", provenance(ctx, truth)},
                    {"noise", {{"model", "additive gaussian, sigma = level * rms(samples), clipped at 4 sigma"},
                               {"level", spec.noise},
                               {"seed", spec.seed},
                               {"sigma_w", sigma_w},
                               {"sigma_mu", sigma_mu},
                               {"clip_sigmas", kClip}}},
                    {"w_layout", "step table over x nodes (left node on [x_i, x_i+1))"},
                    {"mu_layout", "step table over t nodes (right node on (t_k-1, t_k])"},
                    {"s_star", prob.data.s_star}};
    io::write_json(ctx.out / "problem.json", pj);
    json tj = io::control_to_json(truth);
    tj["provenance"] = provenance(ctx, truth);
    io::write_json(ctx.out / "truth_control.json", tj);
    io::write_json(ctx.out / "synth.json", meta);
    std::printf("synth: n=%zu cells=%zu s*=%.6f noise=%g\n", n, truth.cells(), prob.data.s_star, spec.noise);
    return kOk;
}

int cmd_invert(const RunSpec& spec) {
    Context ctx = load(spec, false);
    const SolverConfig cfg = solver_config(spec);
    const MinimizeResult res = minimize(ctx.control, ctx.problem.data, cfg);
    const RunRecord& rec = res.record;
    if (!rec.message.empty() && rec.status != "aborted") std::fprintf(stderr, "warning: %s\n", rec.message.c_str());

    std::ostringstream log;
    for (const IterationRecord& it : rec.iterations) {
        json line = io::iteration_to_json(it, spec.timing);
        line["config_hash"] = ctx.hash;
        log << line.dump() << "\n";
    }
    io::write_text(ctx.out / "run_log.jsonl", log.str());
    json cj = io::control_to_json(res.control);
    cj["provenance"] = provenance(ctx, res.control);
    io::write_json(ctx.out / "control.json", cj);

    json stages = json::array();
    for (const StageSummary& s : rec.stages) {
        stages.push_back({{"A", s.A},
                          {"iterations", s.iterations},
                          {"cost", io::cost_to_json(s.cost)},
                          {"violation", s.violation},
                          {"stop_reason", s.stop_reason}});
    }
    const double c0 = rec.iterations.empty() ? 0.0 : rec.iterations.front().cost.total;
    const double c1 = rec.stages.empty() ? c0 : rec.stages.back().cost.total;
    io::write_json(ctx.out / "summary.json", json{{"provenance", provenance(ctx, res.control)},
                                                  {"status", rec.status},
                                                  {"message", rec.message},
                                                  {"initial_cost", c0},
                                                  {"final_cost", c1},
                                                  {"stages", stages}});
    std::printf("invert: status=%s stages=%zu initial_cost=%.6e final_cost=%.6e\n", rec.status.c_str(),
                rec.stages.size(), c0, c1);
    if (rec.status == "aborted") {
        std::fprintf(stderr, "error: %s\n", rec.message.c_str());
        return kSingular;
    }
    return rec.converged ? kOk : kNotConverged;
}

int cmd_grad_check(const RunSpec& spec) {
    Context ctx = load(spec, false);
    const ProblemData& data = ctx.problem.data;
    const DiscreteControl& v = ctx.control;
    const double A = spec.A0.value_or(1.0);
    const Evaluation ev = evaluate_with_gradient(v, data, A);
    const std::size_t n = v.steps();
    const std::size_t N = v.cells();
    const double t1 = v.time.node(1);
    const double T = v.time.final_time();

    struct Row {
        std::string block;
        long index;
        double analytic;
        double fd;
    };
    std::vector<Row> rows;
    auto run_block = [&](const std::string& block, std::vector<long> idx, std::vector<ControlDirection> dirs) {
        const std::vector<FdPairing> fd = fd_gradient_oracle(v, data, A, spec.eps, dirs);
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            rows.push_back({block, idx[j], pairing(ev.gradient, dirs[j], v), fd[j].value});
        }
    };
    const bool all = spec.component == "all";
    if (all || spec.component == "s") {
        std::vector<long> idx;
        std::vector<ControlDirection> dirs;
        for (std::size_t k = 2; k <= n; ++k) {
            ControlDirection d = zero_direction(v);
            d.ds[k] = 1.0;
            idx.push_back(static_cast<long>(k));
            dirs.push_back(std::move(d));
        }
        ControlDirection d = zero_direction(v);
        for (std::size_t k = 2; k <= n; ++k) d.ds[k] = std::sin(0.5 * M_PI * (v.time.node(k) - t1) / (T - t1));
        idx.push_back(-1);
        dirs.push_back(std::move(d));
        run_block("s", idx, dirs);
    }
    if (all || spec.component == "g") {
        std::vector<long> idx;
        std::vector<ControlDirection> dirs;
        for (std::size_t k = 0; k <= n; ++k) {
            ControlDirection d = zero_direction(v);
            d.dg[k] = 1.0;
            idx.push_back(static_cast<long>(k));
            dirs.push_back(std::move(d));
        }
        ControlDirection d = zero_direction(v);
        for (std::size_t k = 0; k <= n; ++k) d.dg[k] = std::cos(M_PI * v.time.node(k) / T);
        idx.push_back(-1);
        dirs.push_back(std::move(d));
        run_block("g", idx, dirs);
    }
    if (all || spec.component == "f") {
        std::vector<long> idx;
        std::vector<ControlDirection> dirs;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t i = 0; i < v.space.active(r + 1); ++i) {
                ControlDirection d = zero_direction(v);
                d.df(r, i) = 1.0;
                idx.push_back(static_cast<long>(r * N + i));
                dirs.push_back(std::move(d));
            }
        }
        ControlDirection d = zero_direction(v);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t i = 0; i < N; ++i) d.df(r, i) = std::cos(v.space.x(i)) * (1.0 + v.time.node(r + 1));
        }
        idx.push_back(-1);
        dirs.push_back(std::move(d));
        run_block("f", idx, dirs);
    }

    // Unit-direction rows are normalized by the block's largest |fd|; the
    // smooth direction (index -1) by its own |fd|.
    std::map<std::string, double> scale;
    for (const Row& r : rows) {
        if (r.index >= 0) scale[r.block] = std::max(scale[r.block], std::abs(r.fd));
    }
    std::ostringstream csv;
    csv << "# " << provenance_line(ctx, v) << " eps=" << spec.eps << " A=" << A << "\n";
    csv << "component,index,analytic,fd,rel_err\n";
    double worst = 0.0;
    for (const Row& r : rows) {
        const double denom = r.index >= 0 ? scale[r.block] : std::abs(r.fd);
        const double rel = denom > 0.0 ? std::abs(r.analytic - r.fd) / denom : std::abs(r.analytic - r.fd);
        worst = std::max(worst, rel);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%ld,%.17g,%.17g,%.6e\n", r.block.c_str(), r.index, r.analytic, r.fd, rel);
        csv << buf;
    }
    io::write_text(ctx.out / "grad_check.csv", csv.str());
    std::printf("grad-check: %zu rows, max rel_err=%.3e\n", rows.size(), worst);
    return kOk;
}

int cmd_norms(const RunSpec& spec) {
    Context ctx = load(spec, false);
    const DiscreteControl& v = ctx.control;
    const ControlNorms norms = control_norms(v);
    const double tau = v.time.tau();
    std::vector<double> ds(v.s.size() - 1);
    for (std::size_t k = 1; k < v.s.size(); ++k) ds[k - 1] = (v.s[k] - v.s[k - 1]) / tau;
    const json j{{"provenance", provenance(ctx, v)},
                 {"s_b22", norms.s_b22},
                 {"g_b21", norms.g_b21},
                 {"f_l2", norms.f_l2},
                 {"max", norms.max()},
                 {"g_besov_quarter", besov_seminorm_diag(v.g, tau, 0.25)},
                 {"s_slope_besov_quarter", besov_seminorm_diag(ds, tau, 0.25)},
                 {"feasible", is_feasible(v, ctx.problem.data)}};
    io::write_json(ctx.out / "norms.json", j);
    std::printf("norms: s_b22=%.6e g_b21=%.6e f_l2=%.6e max=%.6e\n", norms.s_b22, norms.g_b21, norms.f_l2,
                norms.max());
    return kOk;
}

int run(const RunSpec& spec) {
    try {
        if (spec.command == "forward") return cmd_forward(spec);
        if (spec.command == "synth") return cmd_synth(spec);
        if (spec.command == "invert") return cmd_invert(spec);
        if (spec.command == "grad-check") return cmd_grad_check(spec);
        if (spec.command == "norms") return cmd_norms(spec);
        std::fprintf(stderr, "error: unknown command '%s'\n", spec.command.c_str());
        return kUsage;
    } catch (const SingularStepError& e) {
        std::fprintf(stderr, "error: singular step at time level %zu: %s\n", e.level(), e.what());
        return kSingular;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
}

int main(int argc, const char* const* argv) {
    int rc = kOk;
    const std::optional<RunSpec> spec = parse_args(argc, argv, rc);
    if (!spec) return rc;
    return run(*spec);
}

} // namespace isp::cli
