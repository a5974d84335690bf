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

#include "isp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "isp/error.hpp"

namespace isp {

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> t(n_ + 1);
    for (std::size_t k = 0; k <= n_; ++k) t[k] = node(k);
    return t;
}

std::size_t TimeGrid::step_containing(double t) const noexcept {
    if (t <= tau_) return 1;
    if (t >= T_) return n_;
    auto k = static_cast<std::size_t>(std::ceil(t / tau_));
    // ceil can land one step late when t is a node up to rounding.
    if (k > 1 && t <= node(k - 1)) --k;
    return std::clamp<std::size_t>(k, 1, n_);
}

TimeGrid build_time_grid(double T, std::size_t n) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("time grid: T must be positive");
    if (n < 2) throw InvalidArgument("time grid: need at least 2 steps");
    TimeGrid g;
    g.n_ = n;
    g.T_ = T;
    g.tau_ = T / static_cast<double>(n);
    return g;
}

namespace {

// Number of equal pieces of length <= h covering a segment of length len.
std::size_t pieces(double len, double h) {
    const double r = len / h;
    auto c = static_cast<std::size_t>(std::ceil(r * (1.0 - 1e-12)));
    return std::max<std::size_t>(c, 1);
}

void append_segment(std::vector<double>& nodes, double from, double to, double h) {
    const std::size_t c = pieces(to - from, h);
    const double step = (to - from) / static_cast<double>(c);
    for (std::size_t j = 1; j < c; ++j) nodes.push_back(from + static_cast<double>(j) * step);
    nodes.push_back(to);
}

} // namespace

SpatialGrid build_spatial_grid(const std::vector<double>& s, const GridOptions& opts, const TimeGrid& time) {
    if (s.size() != time.steps() + 1) throw InvalidArgument("spatial grid: need n+1 boundary samples");
    if (opts.m0 < 1) throw InvalidArgument("spatial grid: m0 must be positive");
    if (!(opts.delta > 0.0)) throw InvalidArgument("spatial grid: delta must be positive");
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!std::isfinite(s[k]) || s[k] < opts.delta) {
            std::ostringstream os;
            os << "boundary sample s_" << k << " = " << s[k] << " is below delta = " << opts.delta;
            throw ConstraintViolation(os.str());
        }
    }
    const double ell = opts.ell;
    const double tie = 1e-12 * ell;

    SpatialGrid g;
    g.perm_.resize(s.size());
    std::iota(g.perm_.begin(), g.perm_.end(), std::size_t{0});
    std::stable_sort(g.perm_.begin(), g.perm_.end(), [&](std::size_t l, std::size_t r) { return s[l] < s[r]; });

    const double s_min = s[g.perm_.front()];
    if (s[g.perm_.back()] > ell + tie) throw InvalidArgument("spatial grid: ell must cover every boundary sample");

    g.h_ = s_min / static_cast<double>(opts.m0);
    g.nodes_.reserve(opts.m0 + 4 * s.size());
    for (std::size_t i = 0; i < opts.m0; ++i) g.nodes_.push_back(static_cast<double>(i) * g.h_);
    g.nodes_.push_back(s_min);

    g.sorted_m_.assign(s.size(), 0);
    g.active_.assign(s.size(), 0);
    double level = s_min;
    for (std::size_t j = 0; j < g.perm_.size(); ++j) {
        const double v = s[g.perm_[j]];
        if (v > level + tie) {
            append_segment(g.nodes_, level, v, g.h_);
            level = v;
        }
        g.sorted_m_[j] = g.nodes_.size() - 1;
        g.active_[g.perm_[j]] = g.sorted_m_[j];
    }

    if (ell > level + tie) {
        const std::size_t before = g.nodes_.size();
        append_segment(g.nodes_, level, ell, g.h_);
        g.h_bar_ = (ell - level) / static_cast<double>(g.nodes_.size() - before);
    }

    for (std::size_t i = 0; i + 1 < g.nodes_.size(); ++i) g.max_step_ = std::max(g.max_step_, g.step(i));

    const double limit = opts.coupling * std::sqrt(time.tau());
    if (g.max_step_ > limit) {
        std::ostringstream os;
        os << "max spatial step " << g.max_step_ << " exceeds " << opts.coupling << " * sqrt(tau) = " << limit;
        throw GridCouplingViolation(os.str());
    }
    return g;
}

std::size_t SpatialGrid::cell_containing(double x) const noexcept {
    if (x <= nodes_.front()) return 0;
    if (x >= nodes_.back()) return cells() - 1;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

Reflection reflect(double x, double s) {
    Reflection r{x, 0};
    while (r.point > s) {
        double span = s;
        while (span < r.point) span *= 2.0;
        r.point = span - r.point;
        ++r.iterations;
    }
    if (r.point < 0.0) r.point = 0.0;
    return r;
}

std::size_t max_reflections(double ell, double delta) {
    return 1 + static_cast<std::size_t>(std::ceil(std::log2(ell / delta)));
}

} // namespace isp
