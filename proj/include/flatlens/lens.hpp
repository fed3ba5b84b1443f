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

#pragma once

#include <utility>

namespace flatlens {

// Geometry and weighting parameters of the flattened lens. Lengths in mm.
struct LensSpec {
    double radius_mm = 32.0;         // radius of the original sphere
    double half_thickness_mm = 4.0;  // half-thickness b of the flattened lens
    double weight_amplitude = 1.0;   // a in a*cos(pi*z'/d)
    double weight_period_mm = 10.0;  // d in a*cos(pi*z'/d)
    double eps_min_clamp = 1.0;

    // Throws ConfigError. Requires d > 2b so the cosine weight stays positive
    // over |z'| <= b.
    void validate() const;

    // Width of the rim band |y'| >= R - edge_tolerance treated as vacuum.
    double edge_tolerance_mm() const { return 1e-3 * radius_mm; }
};

struct Point2 {
    double y = 0.0;
    double z = 0.0;
};

struct DiagonalTensorPair {
    double eps_xx = 1.0, eps_yy = 1.0, eps_zz = 1.0;
    double mu_xx = 1.0, mu_yy = 1.0, mu_zz = 1.0;

    static DiagonalTensorPair vacuum() { return {}; }
    static DiagonalTensorPair isotropic(double eps) { return {eps, eps, eps, 1.0, 1.0, 1.0}; }

    double max_eps() const;
    double max_mu() const;
};

// Where the Luneburg permittivity is evaluated inside the transformed tensor.
enum class EpsArgument {
    literal,   // eps(sqrt(y'^2 + z'^2)), as printed for the transformed medium
    preimage,  // eps(sqrt(y^2 + z^2)) at the pre-image point of the sphere
};

// Intermediate quantities of the transformed tensors at one point.
struct TransformFactors {
    double B = 0.0;
    double C = 0.0;
    double lambda_plus = 0.0;   // (-B + sqrt(B^2 - 4C)) / 2
    double lambda_minus = 0.0;  // (-B - sqrt(B^2 - 4C)) / 2
    double scale = 0.0;         // sqrt(R^2 - y'^2) / b
};

// eps(r) = 2 - (r/R)^2. Throws DomainError outside [0, R].
double luneburg_eps(double r_mm, double radius_mm);

// Sphere -> flattened lens: y' = y, z' = b z / sqrt(R^2 - y^2).
Point2 forward_map(Point2 p, const LensSpec& spec);
Point2 inverse_map(Point2 p, const LensSpec& spec);

// Throws EdgeSingularityError in the rim band, DomainError for |z'| > b.
TransformFactors transform_factors(double y_mm, double z_mm, const LensSpec& spec);

DiagonalTensorPair compute_tensors(double y_mm, double z_mm, const LensSpec& spec,
                                   EpsArgument arg = EpsArgument::literal);

// Anisotropy reduction: keep eps_yy, permeability becomes 1.
double reduce_anisotropy(const DiagonalTensorPair& pair);

// max(eps_min_clamp, a*cos(pi*z'/d)*eps).
double apply_weighting(double eps, double z_mm, const LensSpec& spec);

// eps_yy on the axis at the lens centre, 2R/b for the literal profile. Reduced
// maps are capped at this value.
double center_permittivity(const LensSpec& spec);

} // namespace flatlens
