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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isp {

/// Bad caller input (nonpositive extents, mismatched sizes, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A control violates a hard constraint such as s_k >= delta.
class ConstraintViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The spatial grid is too coarse for the time step (max step > C_g * sqrt(tau)).
class GridCouplingViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field was sampled outside of its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A time step produced a (near) singular tridiagonal system.
class SingularStepError : public std::runtime_error {
public:
    SingularStepError(std::size_t level, const std::string& what)
        : std::runtime_error(what + " (time level " + std::to_string(level) + ")"), level_(level) {}

    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

/// Malformed configuration or data file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace isp
