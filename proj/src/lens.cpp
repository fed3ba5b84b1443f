// SPDX-License-Identifier: Apache-2.0
//
// flatlens: flattened Luneburg lens design and verification toolkit
// Copyright (C) 2026 The flatlens authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "flatlens/lens.hpp"

#include "flatlens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flatlens {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("lens: ") + what);
}

} // namespace

void LensSpec::validate() const {
    require(std::isfinite(radius_mm) && radius_mm > 0.0, "R must be > 0");
    require(std::isfinite(half_thickness_mm) && half_thickness_mm > 0.0, "b must be > 0");
    require(half_thickness_mm < radius_mm, "b must be < R");
    require(std::isfinite(weight_amplitude) && weight_amplitude > 0.0, "a must be > 0");
    require(std::isfinite(weight_period_mm) && weight_period_mm > 0.0, "d must be > 0");
    require(eps_min_clamp >= 1.0, "eps_min_clamp must be >= 1");
    require(weight_period_mm > 2.0 * half_thickness_mm,
            "d must exceed 2b so that a*cos(pi*z'/d) stays positive inside the lens");
}

double DiagonalTensorPair::max_eps() const { return std::max({eps_xx, eps_yy, eps_zz}); }
double DiagonalTensorPair::max_mu() const { return std::max({mu_xx, mu_yy, mu_zz}); }

double luneburg_eps(double r_mm, double radius_mm) {
    if (!(r_mm >= 0.0) || r_mm > radius_mm) {
        std::ostringstream os;
        os << "luneburg_eps: r=" << r_mm << " outside [0, " << radius_mm << "]";
        throw DomainError(os.str());
    }
    const double u = r_mm / radius_mm;
    return 2.0 - u * u;
}

Point2 forward_map(Point2 p, const LensSpec& spec) {
    const double R = spec.radius_mm;
    if (std::abs(p.y) >= R) throw DomainError("forward_map: |y| >= R, column is singular");
    return {p.y, spec.half_thickness_mm * p.z / std::sqrt(R * R - p.y * p.y)};
}

Point2 inverse_map(Point2 p, const LensSpec& spec) {
    const double R = spec.radius_mm;
    if (std::abs(p.y) >= R) throw DomainError("inverse_map: |y'| >= R, column is singular");
    return {p.y, p.z * std::sqrt(R * R - p.y * p.y) / spec.half_thickness_mm};
}

TransformFactors transform_factors(double y, double z, const LensSpec& spec) {
    const double R = spec.radius_mm;
    const double b = spec.half_thickness_mm;
    if (std::abs(y) >= R - spec.edge_tolerance_mm()) {
        throw EdgeSingularityError("compute_tensors: point inside the rim band |y'| >= R - tol_edge");
    }
    if (std::abs(z) > b * (1.0 + 1e-12)) throw DomainError("compute_tensors: |z'| > b");

    const double q = R * R - y * y;
    const double C = b * b / q;
    const double t = z * z * y * y / (q * q);

    TransformFactors f;
    f.C = C;
    f.B = -(C + 1.0 + t);
    f.scale = std::sqrt(q) / b;
    if (t == 0.0) {
        // roots of (lambda - 1)(lambda - C)
        f.lambda_plus = std::max(1.0, C);
        f.lambda_minus = std::min(1.0, C);
    } else {
        // B^2 - 4C rewritten as a sum of non-negative terms
        const double disc = (C - 1.0) * (C - 1.0) + t * t + 2.0 * t * (C + 1.0);
        f.lambda_plus = 0.5 * (-f.B + std::sqrt(disc));
        f.lambda_minus = C / f.lambda_plus;
    }
    return f;
}

DiagonalTensorPair compute_tensors(double y, double z, const LensSpec& spec, EpsArgument arg) {
    const TransformFactors f = transform_factors(y, z, spec);
    const double R = spec.radius_mm;

    double r = 0.0;
    if (arg == EpsArgument::literal) {
        r = std::hypot(y, z);
    } else {
        const Point2 pre = inverse_map({y, z}, spec);
        r = std::hypot(pre.y, pre.z);
    }
    const double eps = luneburg_eps(std::min(r, R), R);

    DiagonalTensorPair out;
    out.mu_xx = f.scale;
    out.mu_yy = f.scale * f.lambda_plus;
    out.mu_zz = f.scale * f.lambda_minus;
    out.eps_xx = eps * out.mu_xx;
    out.eps_yy = eps * out.mu_yy;
    out.eps_zz = eps * out.mu_zz;
    return out;
}

double reduce_anisotropy(const DiagonalTensorPair& pair) { return pair.eps_yy; }

double apply_weighting(double eps, double z, const LensSpec& spec) {
    if (std::abs(z) > spec.half_thickness_mm * (1.0 + 1e-12)) throw DomainError("apply_weighting: |z'| > b");
    const double w = spec.weight_amplitude * std::cos(std::numbers::pi * z / spec.weight_period_mm);
    if (!(w > 0.0)) throw ConfigError("apply_weighting: non-positive weight inside the lens (need d > 2b)");
    return std::max(spec.eps_min_clamp, w * eps);
}

double center_permittivity(const LensSpec& spec) {
    return reduce_anisotropy(compute_tensors(0.0, 0.0, spec));
}

} // namespace flatlens
