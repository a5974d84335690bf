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
#include <optional>
#include <string>
#include <vector>

namespace isp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNotConverged = 3, kSingular = 4 };

struct RunSpec {
    std::string command;            ///< forward, invert, grad-check, norms, synth
    std::string problem;
    std::string control;
    std::string out = ".";
    std::optional<std::size_t> n;
    std::optional<std::size_t> m0;
    std::uint64_t seed = 0;
    double noise = 0.0;
    std::optional<std::size_t> stages;
    std::string component = "all";  ///< grad-check filter: s, g, f or all
    double eps = 1e-5;
    std::size_t refine = 0;         ///< forward: extra refinement levels against "exact"
    bool timing = false;            ///< include wall time in the run log
    // Solver overrides.
    std::optional<std::size_t> inner;
    std::optional<double> A0;
    std::optional<double> rho;
    std::optional<double> grad_tol;
    std::optional<double> violation_tol;
    std::string free_blocks = "sgf";
    std::string feasible_set = "vr";  ///< vr or wr
};

/// Parses argv; returns the exit code on failure or --help.
std::optional<RunSpec> parse_args(int argc, const char* const* argv, int& exit_code);

int run(const RunSpec& spec);
int main(int argc, const char* const* argv);

int cmd_forward(const RunSpec& spec);
int cmd_synth(const RunSpec& spec);
int cmd_invert(const RunSpec& spec);
int cmd_grad_check(const RunSpec& spec);
int cmd_norms(const RunSpec& spec);

/// Standard normal samples from a seeded mt19937_64 (Box-Muller on 53-bit
/// uniforms), identical across platforms.
std::vector<double> gaussian_samples(std::uint64_t seed, std::size_t count);

} // namespace isp::cli
