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

#include "isp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isp/error.hpp"
#include "isp/quadrature.hpp"

namespace isp {

void ProblemData::validate() {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgument(std::string("problem data: ") + what);
    };
    require(T > 0.0 && std::isfinite(T), "T must be positive");
    require(ell > 0.0 && std::isfinite(ell), "ell must be positive");
    require(delta > 0.0, "delta must be positive");
    require(delta <= s0 && s0 <= ell, "need delta <= s0 <= ell");
    require(delta <= s_star && s_star <= ell, "need s_star in [delta, ell]");
    require(beta0 >= 0.0 && beta1 >= 0.0 && beta2 >= 0.0, "weights must be nonnegative");
    require(beta0 + beta1 + beta2 > 0.0, "at least one weight must be positive");
    require(a0 > 0.0, "a0 must be positive");
    require(R > 0.0, "R must be positive");
    const Box box = domain();
    for (Field* f : {&a, &b, &c, &phi, &gamma, &chi, &mu, &w}) f->set_domain(box);
}

EllipticityAudit audit_ellipticity(const ProblemData& data, const TimeGrid& time, const SpatialGrid& space) {
    EllipticityAudit audit{std::numeric_limits<double>::infinity(), false};
    for (std::size_t k = 0; k <= time.steps(); ++k) {
        for (std::size_t i = 0; i <= space.cells(); ++i) audit.min_a = std::min(audit.min_a, data.a(space.x(i), time.node(k)));
    }
    for (std::size_t k = 1; k <= time.steps(); ++k) {
        const double ta = time.node(k - 1);
        const double tb = time.node(k);
        for (std::size_t i = 0; i < space.cells(); ++i) {
            const double xa = space.x(i);
            const double xb = space.x(i + 1);
            for (double qt : quad::kNodes) {
                const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * qt;
                for (double qx : quad::kNodes) {
                    const double x = 0.5 * (xa + xb) + 0.5 * (xb - xa) * qx;
                    audit.min_a = std::min(audit.min_a, data.a(x, t));
                }
            }
        }
    }
    audit.ok = audit.min_a >= data.a0;
    return audit;
}

} // namespace isp
