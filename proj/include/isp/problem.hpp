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

#include <string>

#include "isp/field.hpp"
#include "isp/grid.hpp"

namespace isp {

/// Fixed coefficients and measurements of one inverse Stefan problem.
/// Fields live on D = [0, ell] x [0, T]; phi and w ignore t, mu ignores x.
struct ProblemData {
    Field a = Field::constant(1.0);   ///< diffusion, a >= a0 > 0
    Field b = Field::constant(0.0);   ///< convection
    Field c = Field::constant(0.0);   ///< reaction
    Field phi = Field::constant(0.0); ///< initial temperature on [0, s0]
    Field gamma = Field::constant(1.0);
    Field chi = Field::constant(0.0);
    Field mu = Field::constant(0.0);  ///< phase-transition temperature
    Field w = Field::constant(0.0);   ///< final-time temperature measurement

    double s_star = 1.0;              ///< measured final boundary
    double u_star = 1e300;            ///< temperature cap
    double beta0 = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double delta = 0.5;
    double R = 1e6;
    double s0 = 1.0;
    double T = 1.0;
    double ell = 2.0;
    double a0 = 1e-12;

    /// Checks the scalar invariants and attaches D to every field.
    /// Throws InvalidArgument on violation.
    void validate();

    Box domain() const { return Box{0.0, ell, 0.0, T}; }

    double phi_at(double x) const { return phi(x, 0.0); }
    double w_at(double x) const { return w(x, T); }
    double mu_at(double t) const { return mu(0.0, t); }

    /// a(0,0) * phi'(0): flux value compatible with the initial data.
    double compatible_flux() const { return a(0.0, 0.0) * phi.dx(0.0, 0.0); }
};

struct EllipticityAudit {
    double min_a = 0.0;
    bool ok = false;
};

/// Minimum of a over all quadrature points of the space-time grid.
EllipticityAudit audit_ellipticity(const ProblemData& data, const TimeGrid& time, const SpatialGrid& space);

} // namespace isp
