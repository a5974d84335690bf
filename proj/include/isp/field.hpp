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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace isp {

/// Closed rectangle [x_min, x_max] x [t_min, t_max].
struct Box {
    double x_min = 0.0;
    double x_max = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

struct PolynomialTerm {
    double coef = 0.0;
    int px = 0;   ///< power of x
    int pt = 0;   ///< power of t
};

enum class Interpolation { Linear, Step };

/// Scalar field on (x, t). Spatial-only or temporal-only data (phi, w, mu)
/// are fields that ignore one argument.
///
/// Kinds:
///  - preset: "constant" (param "value"), "zero", "one";
///  - polynomial: sum of coef * x^px * t^pt;
///  - tabulated: values on a tensor grid, bilinear or piecewise constant
///    (step: left node on [x_i, x_{i+1}), right node on (t_{k-1}, t_k]);
///    an axis of length one makes the field constant along it;
///  - custom: an arbitrary callable (not serializable).
class Field {
public:
    struct Preset {
        std::string name;
        std::map<std::string, double> params;
        double value = 0.0;
    };
    struct Polynomial {
        std::vector<PolynomialTerm> terms;
    };
    struct Tabulated {
        std::vector<double> xs;
        std::vector<double> ts;
        std::vector<double> values;   ///< row-major: values[ix * ts.size() + it]
        Interpolation interp = Interpolation::Linear;
        std::vector<double> dvalues;  ///< d/dx on table nodes
        std::string source;           ///< CSV path if loaded from disk
    };
    struct Custom {
        std::function<double(double, double)> value;
        std::function<double(double, double)> dx;
    };
    using Spec = std::variant<Preset, Polynomial, Tabulated, Custom>;

    Field() : Field(constant(0.0)) {}

    static Field constant(double value);
    static Field preset(const std::string& name, const std::map<std::string, double>& params = {});
    static Field polynomial(std::vector<PolynomialTerm> terms);
    static Field tabulated(std::vector<double> xs, std::vector<double> ts, std::vector<double> values,
                           Interpolation interp = Interpolation::Linear);
    static Field custom(std::function<double(double, double)> value,
                        std::function<double(double, double)> dx = {});

    /// Evaluates the field; throws DomainError outside the attached domain.
    double operator()(double x, double t) const;
    /// Partial derivative in x.
    double dx(double x, double t) const;

    void set_domain(const Box& box) { domain_ = box; }
    const std::optional<Box>& domain() const noexcept { return domain_; }

    const Spec& spec() const noexcept { return spec_; }
    bool is_constant() const noexcept;
    Tabulated* tabulated_spec() noexcept { return std::get_if<Tabulated>(&spec_); }

private:
    explicit Field(Spec spec) : spec_(std::move(spec)) {}
    void check_domain(double x, double t) const;

    Spec spec_;
    std::optional<Box> domain_;
};

/// Free-function spelling used by the data-sampling layer.
inline double sample_field(const Field& field, double x, double t) { return field(x, t); }

} // namespace isp
