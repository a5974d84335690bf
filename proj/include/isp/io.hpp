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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "isp/control.hpp"
#include "isp/forward.hpp"
#include "isp/objective.hpp"
#include "isp/optimizer.hpp"
#include "isp/problem.hpp"

namespace isp::io {

using nlohmann::json;

/// Field specs:
///   3.5                                            constant
///   {"kind": "preset", "name": "constant", "params": {"value": 3.5}}
///   {"kind": "polynomial", "terms": [[coef, px, pt], ...]}
///   {"kind": "tabulated", "interp": "linear"|"step", "xs": [...], "ts": [...], "values": [...]}
///   {"kind": "tabulated", "interp": ..., "csv": "file.csv", "layout": "long"|"rect"}
/// Relative CSV paths resolve against base.
Field field_from_json(const json& j, const std::filesystem::path& base = {});
json field_to_json(const Field& f);

/// Long layout rows "x,t,value"; rect layout has a header "x,t_0,t_1,..."
/// followed by one row "x_i,v_i0,v_i1,..." per x node.
Field load_tabulated_csv(const std::filesystem::path& path, const std::string& layout, Interpolation interp);

/// Problem JSON: the eight fields, the scalars, and an optional "grid"
/// object {"n", "m0", "coupling"} with defaults for the CLI.
struct ProblemFile {
    ProblemData data;
    std::size_t n = 16;
    std::size_t m0 = 16;
    double coupling = 2.0;
};

ProblemFile problem_from_json(const json& j, const std::filesystem::path& base = {});
json problem_to_json(const ProblemFile& p);
ProblemFile load_problem(const std::filesystem::path& path);

GridOptions grid_options(const ProblemFile& p, std::size_t m0);

/// Control JSON: "s" and "g" are arrays of n+1 samples or field specs of
/// t; "f" is {"rows", "cols", "values"} (row-major, rows = steps) or a
/// field spec averaged over the cells. Array forms fix n; "m0" is optional.
DiscreteControl control_from_json(const json& j, const ProblemFile& problem, std::size_t n, std::size_t m0,
                                  const std::filesystem::path& base = {});
json control_to_json(const DiscreteControl& c);

/// Constant control s = s0, g = a(0,0) phi'(0), f = 0.
DiscreteControl default_control(const ProblemFile& problem, std::size_t n, std::size_t m0);

json cost_to_json(const CostBreakdown& c);
json energy_to_json(const EnergyReport& e);
json iteration_to_json(const IterationRecord& r, bool timing);

/// "k,t,i,x,u" rows for the active nodes of every level.
void write_trajectory_csv(const std::filesystem::path& path, const StateTrajectory& traj, const std::string& header);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace isp::io
