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

#include "isp/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "isp/error.hpp"

namespace isp::io {

namespace fs = std::filesystem;

namespace {

Interpolation parse_interp(const json& j) {
    const std::string s = j.value("interp", std::string("linear"));
    if (s == "linear") return Interpolation::Linear;
    if (s == "step") return Interpolation::Step;
    throw IoError("unknown interpolation '" + s + "'");
}

std::vector<double> split_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw IoError("bad number '" + cell + "' in CSV");
        }
    }
    return out;
}

std::size_t index_of(std::vector<double>& axis, double v) {
    auto it = std::find(axis.begin(), axis.end(), v);
    if (it == axis.end()) {
        axis.push_back(v);
        return axis.size() - 1;
    }
    return static_cast<std::size_t>(it - axis.begin());
}

double number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw IoError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

} // namespace

Field load_tabulated_csv(const fs::path& path, const std::string& layout, Interpolation interp) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw IoError(path.string() + ": empty table");

    if (layout == "rect") {
        std::vector<double> head = split_row(lines[0].substr(lines[0].find(',') + 1));
        std::vector<double> xs;
        std::vector<double> values;
        for (std::size_t r = 1; r < lines.size(); ++r) {
            std::vector<double> row = split_row(lines[r]);
            if (row.size() != head.size() + 1) throw IoError(path.string() + ": ragged rectangular table");
            xs.push_back(row[0]);
            values.insert(values.end(), row.begin() + 1, row.end());
        }
        return Field::tabulated(std::move(xs), std::move(head), std::move(values), interp);
    }
    if (layout != "long") throw IoError("unknown CSV layout '" + layout + "'");

    std::size_t first = 0;
    if (lines[0].find_first_of("xtv") != std::string::npos) first = 1;
    std::vector<double> xs;
    std::vector<double> ts;
    std::vector<std::array<double, 3>> rows;
    for (std::size_t r = first; r < lines.size(); ++r) {
        std::vector<double> row = split_row(lines[r]);
        if (row.size() != 3) throw IoError(path.string() + ": long layout needs x,t,value rows");
        rows.push_back({row[0], row[1], row[2]});
        index_of(xs, row[0]);
        index_of(ts, row[1]);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ts.begin(), ts.end());
    if (rows.size() != xs.size() * ts.size()) throw IoError(path.string() + ": long layout is not a full tensor grid");
    std::vector<double> values(rows.size(), 0.0);
    for (const auto& [x, t, v] : rows) {
        const auto ix = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
        const auto it = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
        values[ix * ts.size() + it] = v;
    }
    return Field::tabulated(std::move(xs), std::move(ts), std::move(values), interp);
}

Field field_from_json(const json& j, const fs::path& base) {
    if (j.is_number()) return Field::constant(j.get<double>());
    if (!j.is_object()) throw IoError("field spec must be a number or an object");
    const std::string kind = j.value("kind", std::string());
    try {
        if (kind == "preset") {
            std::map<std::string, double> params;
            if (j.contains("params")) params = j.at("params").get<std::map<std::string, double>>();
            return Field::preset(j.at("name").get<std::string>(), params);
        }
        if (kind == "polynomial") {
            std::vector<PolynomialTerm> terms;
            for (const auto& t : j.at("terms")) {
                if (!t.is_array() || t.size() != 3) throw IoError("polynomial term must be [coef, px, pt]");
                terms.push_back({t[0].get<double>(), t[1].get<int>(), t[2].get<int>()});
            }
            return Field::polynomial(std::move(terms));
        }
        if (kind == "tabulated") {
            const Interpolation interp = parse_interp(j);
            if (j.contains("csv")) {
                fs::path p = j.at("csv").get<std::string>();
                if (p.is_relative()) p = base / p;
                Field f = load_tabulated_csv(p, j.value("layout", std::string("long")), interp);
                f.tabulated_spec()->source = j.at("csv").get<std::string>();
                return f;
            }
            return Field::tabulated(j.at("xs").get<std::vector<double>>(), j.at("ts").get<std::vector<double>>(),
                                    j.at("values").get<std::vector<double>>(), interp);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("bad field spec: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("bad field spec: ") + e.what());
    }
    throw IoError("unknown field kind '" + kind + "'");
}

json field_to_json(const Field& f) {
    return std::visit(
        [](const auto& spec) -> json {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, Field::Preset>) {
                return json{{"kind", "preset"}, {"name", spec.name}, {"params", spec.params}};
            } else if constexpr (std::is_same_v<T, Field::Polynomial>) {
                json terms = json::array();
                for (const auto& t : spec.terms) terms.push_back({t.coef, t.px, t.pt});
                return json{{"kind", "polynomial"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, Field::Tabulated>) {
                return json{{"kind", "tabulated"},
                            {"interp", spec.interp == Interpolation::Step ? "step" : "linear"},
                            {"xs", spec.xs},
                            {"ts", spec.ts},
                            {"values", spec.values}};
            } else {
                throw IoError("custom fields cannot be serialized");
            }
        },
        f.spec());
}

ProblemFile problem_from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw IoError("problem file must hold a JSON object");
    ProblemFile p;
    ProblemData& d = p.data;
    auto field = [&](const char* key, Field& out) {
        if (j.contains(key)) out = field_from_json(j.at(key), base);
    };
    field("a", d.a);
    field("b", d.b);
    field("c", d.c);
    field("phi", d.phi);
    field("gamma", d.gamma);
    field("chi", d.chi);
    field("mu", d.mu);
    field("w", d.w);
    d.s_star = number(j, "s_star", d.s_star);
    d.u_star = number(j, "u_star", d.u_star);
    d.beta0 = number(j, "beta0", d.beta0);
    d.beta1 = number(j, "beta1", d.beta1);
    d.beta2 = number(j, "beta2", d.beta2);
    d.delta = number(j, "delta", d.delta);
    d.R = number(j, "R", d.R);
    d.s0 = number(j, "s0", d.s0);
    d.T = number(j, "T", d.T);
    d.ell = number(j, "ell", d.ell);
    d.a0 = number(j, "a0", d.a0);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        p.n = static_cast<std::size_t>(number(g, "n", static_cast<double>(p.n)));
        p.m0 = static_cast<std::size_t>(number(g, "m0", static_cast<double>(p.m0)));
        p.coupling = number(g, "coupling", p.coupling);
    }
    try {
        d.validate();
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("invalid problem: ") + e.what());
    }
    return p;
}

json problem_to_json(const ProblemFile& p) {
    const ProblemData& d = p.data;
    json j;
    j["a"] = field_to_json(d.a);
    j["b"] = field_to_json(d.b);
    j["c"] = field_to_json(d.c);
    j["phi"] = field_to_json(d.phi);
    j["gamma"] = field_to_json(d.gamma);
    j["chi"] = field_to_json(d.chi);
    j["mu"] = field_to_json(d.mu);
    j["w"] = field_to_json(d.w);
    j["s_star"] = d.s_star;
    j["u_star"] = d.u_star;
    j["beta0"] = d.beta0;
    j["beta1"] = d.beta1;
    j["beta2"] = d.beta2;
    j["delta"] = d.delta;
    j["R"] = d.R;
    j["s0"] = d.s0;
    j["T"] = d.T;
    j["ell"] = d.ell;
    j["a0"] = d.a0;
    j["grid"] = {{"n", p.n}, {"m0", p.m0}, {"coupling", p.coupling}};
    return j;
}

ProblemFile load_problem(const fs::path& path) {
    return problem_from_json(read_json(path), path.parent_path());
}

GridOptions grid_options(const ProblemFile& p, std::size_t m0) {
    GridOptions o;
    o.m0 = m0;
    o.ell = p.data.ell;
    o.delta = p.data.delta;
    o.coupling = p.coupling;
    return o;
}

DiscreteControl control_from_json(const json& j, const ProblemFile& problem, std::size_t n, std::size_t m0,
                                  const fs::path& base) {
    if (!j.is_object()) throw IoError("control file must hold a JSON object");
    const ProblemData& d = problem.data;
    if (j.contains("s") && j.at("s").is_array()) n = j.at("s").size() - 1;
    if (j.contains("m0")) m0 = j.at("m0").get<std::size_t>();
    if (n < 2) throw IoError("control needs at least three time nodes");
    const TimeGrid time = build_time_grid(d.T, n);
    const GridOptions opts = grid_options(problem, m0);

    auto samples = [&](const char* key, double fallback) {
        std::vector<double> out(n + 1, fallback);
        if (!j.contains(key)) return out;
        const json& v = j.at(key);
        if (v.is_array()) {
            out = v.get<std::vector<double>>();
            if (out.size() != n + 1) throw IoError(std::string("control '") + key + "' needs n+1 samples");
            return out;
        }
        Field f = field_from_json(v, base);
        for (std::size_t k = 0; k <= n; ++k) out[k] = f(0.0, time.node(k));
        return out;
    };
    std::vector<double> s = samples("s", d.s0);
    std::vector<double> g = samples("g", d.compatible_flux());
    if (j.contains("s") && !j.at("s").is_array()) s[1] = s[0];
    const SpatialGrid space = build_spatial_grid(s, opts, time);

    Matrix f(n, space.cells());
    if (j.contains("f")) {
        const json& v = j.at("f");
        if (v.is_object() && v.contains("values")) {
            const auto rows = v.at("rows").get<std::size_t>();
            const auto cols = v.at("cols").get<std::size_t>();
            const auto vals = v.at("values").get<std::vector<double>>();
            if (rows != n || vals.size() != rows * cols) throw IoError("control 'f' has the wrong shape");
            Matrix raw(rows, cols);
            std::copy(vals.begin(), vals.end(), raw.data().begin());
            if (cols == space.cells()) {
                f = std::move(raw);
            } else if (v.contains("nodes")) {
                std::vector<double> xs = v.at("nodes").get<std::vector<double>>();
                std::vector<double> s_from = v.contains("s") ? v.at("s").get<std::vector<double>>() : s;
                const SpatialGrid from = build_spatial_grid(s_from, opts, time);
                if (from.nodes() != xs) throw IoError("control 'f' nodes do not match its boundary samples");
                f = remap_source(raw, from, space);
            } else {
                throw IoError("control 'f' has " + std::to_string(cols) + " columns, grid has " +
                              std::to_string(space.cells()));
            }
        } else {
            Field field = field_from_json(v, base);
            for (std::size_t k = 1; k <= n; ++k) {
                for (std::size_t i = 0; i < space.cells(); ++i) {
                    f(k - 1, i) = steklov_cell_avg(field, i, k, time, space);
                }
            }
        }
    }
    return make_control(time, std::move(s), std::move(g), std::move(f), opts);
}

json control_to_json(const DiscreteControl& c) {
    json j;
    j["n"] = c.steps();
    j["T"] = c.time.final_time();
    j["m0"] = c.options.m0;
    j["s"] = c.s;
    j["g"] = c.g;
    j["f"] = {{"rows", c.f.rows()},
              {"cols", c.f.cols()},
              {"values", c.f.data()},
              {"nodes", c.space.nodes()},
              {"s", c.s}};
    return j;
}

DiscreteControl default_control(const ProblemFile& problem, std::size_t n, std::size_t m0) {
    const ProblemData& d = problem.data;
    const TimeGrid time = build_time_grid(d.T, n);
    const GridOptions opts = grid_options(problem, m0);
    std::vector<double> s(n + 1, d.s0);
    std::vector<double> g(n + 1, d.compatible_flux());
    const SpatialGrid space = build_spatial_grid(s, opts, time);
    return make_control(time, std::move(s), std::move(g), Matrix(n, space.cells()), opts);
}

json cost_to_json(const CostBreakdown& c) {
    return json{{"final_misfit", c.final_misfit},       {"boundary_misfit", c.boundary_misfit},
                {"boundary_final", c.boundary_final},   {"penalty", c.penalty},
                {"total", c.total},                     {"A", c.A},
                {"constraint_violation", c.constraint_violation}};
}

json energy_to_json(const EnergyReport& e) {
    return json{{"mass_max", e.mass_max},
                {"dissipation", e.dissipation},
                {"lhs", e.lhs},
                {"phi_norm2", e.phi_norm2},
                {"g_norm2", e.g_norm2},
                {"f_norm2", e.f_norm2},
                {"latent_norm2", e.latent_norm2},
                {"chi_norm2", e.chi_norm2},
                {"growth_term", e.growth_term},
                {"rhs", e.rhs},
                {"ratio", e.ratio},
                {"see_gradient_max", e.see_gradient_max},
                {"see_time_sum", e.see_time_sum},
                {"see_mixed_sum", e.see_mixed_sum}};
}

json iteration_to_json(const IterationRecord& r, bool timing) {
    json j{{"stage", r.stage},          {"iteration", r.iteration}, {"cost", cost_to_json(r.cost)},
           {"step", r.step},            {"grad_norm", r.grad_norm}, {"violation", r.violation}};
    if (timing) j["wall_seconds"] = r.wall_seconds;
    return j;
}

void write_trajectory_csv(const fs::path& path, const StateTrajectory& traj, const std::string& header) {
    std::ostringstream out;
    if (!header.empty()) out << "# " << header << "\n";
    out << "k,t,i,x,u\n";
    char buf[128];
    for (std::size_t k = 0; k <= traj.time.steps(); ++k) {
        for (std::size_t i = 0; i <= traj.active(k); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%.17g,%.17g\n", k, traj.time.node(k), i, traj.space.x(i),
                          traj.u(k, i));
            out << buf;
        }
    }
    write_text(path, out.str());
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace isp::io
