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

#include "isp/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isp/error.hpp"

namespace isp {

namespace {

double ipow(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

// Bracketing index and weight along one axis; axis of size 1 is degenerate.
struct AxisPos {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double w = 0.0;   // weight of hi
};

bool outside(const std::vector<double>& axis, double v) {
    if (axis.size() < 2) return false;
    const double tol = 1e-12 * (axis.back() - axis.front()) + 1e-14;
    return v < axis.front() - tol || v > axis.back() + tol;
}

AxisPos locate_linear(const std::vector<double>& axis, double v) {
    if (axis.size() == 1) return {};
    if (v <= axis.front()) return {0, 1, 0.0};
    if (v >= axis.back()) return {axis.size() - 2, axis.size() - 1, 1.0};
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    std::size_t lo = hi - 1;
    return {lo, hi, (v - axis[lo]) / (axis[hi] - axis[lo])};
}

// Left node of [a_i, a_{i+1}).
std::size_t locate_step_left(const std::vector<double>& axis, double v) {
    if (axis.size() == 1 || v <= axis.front()) return 0;
    if (v >= axis.back()) return axis.size() - 1;
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    return static_cast<std::size_t>(it - axis.begin()) - 1;
}

// Right node of (a_{k-1}, a_k].
std::size_t locate_step_right(const std::vector<double>& axis, double v) {
    if (axis.size() == 1 || v <= axis.front()) return 0;
    if (v >= axis.back()) return axis.size() - 1;
    auto it = std::lower_bound(axis.begin(), axis.end(), v);
    return static_cast<std::size_t>(it - axis.begin());
}

double bilinear(const Field::Tabulated& tab, const std::vector<double>& vals, double x, double t) {
    const std::size_t nt = tab.ts.size();
    const AxisPos px = locate_linear(tab.xs, x);
    const AxisPos pt = locate_linear(tab.ts, t);
    auto at = [&](std::size_t ix, std::size_t it) { return vals[ix * nt + it]; };
    const double lo = (1.0 - pt.w) * at(px.lo, pt.lo) + pt.w * at(px.lo, pt.hi);
    const double hi = (1.0 - pt.w) * at(px.hi, pt.lo) + pt.w * at(px.hi, pt.hi);
    return (1.0 - px.w) * lo + px.w * hi;
}

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw InvalidArgument(std::string("tabulated field: empty ") + name + " axis");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1]))
            throw InvalidArgument(std::string("tabulated field: ") + name + " axis must be strictly increasing");
    }
}

} // namespace

Field Field::constant(double value) {
    Preset p;
    p.name = "constant";
    p.params["value"] = value;
    p.value = value;
    return Field(Spec{std::move(p)});
}

Field Field::preset(const std::string& name, const std::map<std::string, double>& params) {
    Preset p;
    p.name = name;
    p.params = params;
    if (name == "zero") {
        p.value = 0.0;
    } else if (name == "one") {
        p.value = 1.0;
    } else if (name == "constant") {
        auto it = params.find("value");
        if (it == params.end()) throw InvalidArgument("preset 'constant' needs a 'value'");
        p.value = it->second;
    } else {
        throw InvalidArgument("unknown field preset '" + name + "'");
    }
    return Field(Spec{std::move(p)});
}

Field Field::polynomial(std::vector<PolynomialTerm> terms) {
    for (const auto& term : terms) {
        if (term.px < 0 || term.pt < 0) throw InvalidArgument("polynomial field: negative power");
    }
    return Field(Spec{Polynomial{std::move(terms)}});
}

Field Field::tabulated(std::vector<double> xs, std::vector<double> ts, std::vector<double> values,
                       Interpolation interp) {
    check_axis(xs, "x");
    check_axis(ts, "t");
    if (values.size() != xs.size() * ts.size()) throw InvalidArgument("tabulated field: value count mismatch");
    Tabulated tab{std::move(xs), std::move(ts), std::move(values), interp, {}, {}};
    const std::size_t nx = tab.xs.size();
    const std::size_t nt = tab.ts.size();
    tab.dvalues.assign(tab.values.size(), 0.0);
    if (interp == Interpolation::Linear && nx > 1) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t l = ix == 0 ? 0 : ix - 1;
            const std::size_t r = ix + 1 == nx ? nx - 1 : ix + 1;
            for (std::size_t it = 0; it < nt; ++it) {
                tab.dvalues[ix * nt + it] =
                    (tab.values[r * nt + it] - tab.values[l * nt + it]) / (tab.xs[r] - tab.xs[l]);
            }
        }
    }
    return Field(Spec{std::move(tab)});
}

Field Field::custom(std::function<double(double, double)> value, std::function<double(double, double)> dx) {
    if (!value) throw InvalidArgument("custom field: empty callable");
    return Field(Spec{Custom{std::move(value), std::move(dx)}});
}

void Field::check_domain(double x, double t) const {
    if (const auto* tab = std::get_if<Tabulated>(&spec_)) {
        if (outside(tab->xs, x) || outside(tab->ts, t)) {
            std::ostringstream os;
            os << "tabulated field sampled outside its table at (" << x << ", " << t << ")";
            throw DomainError(os.str());
        }
    }
    if (!domain_) return;
    const Box& b = *domain_;
    const double tx = 1e-12 * std::max(1.0, b.x_max - b.x_min);
    const double tt = 1e-12 * std::max(1.0, b.t_max - b.t_min);
    if (x < b.x_min - tx || x > b.x_max + tx || t < b.t_min - tt || t > b.t_max + tt) {
        std::ostringstream os;
        os << "field sampled outside D at (" << x << ", " << t << ")";
        throw DomainError(os.str());
    }
}

double Field::operator()(double x, double t) const {
    check_domain(x, t);
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Preset>) {
                return s.value;
            } else if constexpr (std::is_same_v<S, Polynomial>) {
                double acc = 0.0;
                for (const auto& term : s.terms) acc += term.coef * ipow(x, term.px) * ipow(t, term.pt);
                return acc;
            } else if constexpr (std::is_same_v<S, Tabulated>) {
                if (s.interp == Interpolation::Linear) return bilinear(s, s.values, x, t);
                return s.values[locate_step_left(s.xs, x) * s.ts.size() + locate_step_right(s.ts, t)];
            } else {
                return s.value(x, t);
            }
        },
        spec_);
}

double Field::dx(double x, double t) const {
    check_domain(x, t);
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Preset>) {
                return 0.0;
            } else if constexpr (std::is_same_v<S, Polynomial>) {
                double acc = 0.0;
                for (const auto& term : s.terms) {
                    if (term.px > 0) acc += term.coef * term.px * ipow(x, term.px - 1) * ipow(t, term.pt);
                }
                return acc;
            } else if constexpr (std::is_same_v<S, Tabulated>) {
                if (s.interp == Interpolation::Step) return 0.0;
                return bilinear(s, s.dvalues, x, t);
            } else {
                if (s.dx) return s.dx(x, t);
                const double e = 1e-6 * std::max(1.0, std::abs(x));
                return (s.value(x + e, t) - s.value(x - e, t)) / (2.0 * e);
            }
        },
        spec_);
}

bool Field::is_constant() const noexcept {
    if (std::holds_alternative<Preset>(spec_)) return true;
    if (const auto* p = std::get_if<Polynomial>(&spec_)) {
        return std::all_of(p->terms.begin(), p->terms.end(),
                           [](const PolynomialTerm& t) { return (t.px == 0 && t.pt == 0) || t.coef == 0.0; });
    }
    return false;
}

} // namespace isp
