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

#include "flatlens/material_map.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace flatlens {

namespace {

bool is_vacuum(const DiagonalTensorPair& p) {
    return p.eps_xx == 1.0 && p.eps_yy == 1.0 && p.eps_zz == 1.0 && p.mu_xx == 1.0 && p.mu_yy == 1.0 &&
           p.mu_zz == 1.0;
}

} // namespace

Box Box::united(const Box& o) const {
    return {std::min(y_min, o.y_min), std::max(y_max, o.y_max), std::min(z_min, o.z_min), std::max(z_max, o.z_max)};
}

MaterialMap::MaterialMap(Grid2D grid, std::vector<DiagonalTensorPair> nodes, bool reduced, bool weighted,
                         std::optional<LensSpec> spec)
    : grid_(grid), nodes_(std::move(nodes)), reduced_(reduced), weighted_(weighted), spec_(spec) {
    if (nodes_.size() != grid_.size()) throw ConfigError("MaterialMap: node count does not match grid");
    if (grid_.y.step <= 0.0 || grid_.z.step <= 0.0) throw ConfigError("MaterialMap: grid spacing must be > 0");
}

MaterialMap MaterialMap::vacuum(Grid2D grid) {
    return MaterialMap(grid, std::vector<DiagonalTensorPair>(grid.size()), true, false);
}

DiagonalTensorPair MaterialMap::lookup(double y, double z) const {
    const auto iy = grid_.y.nearest(y);
    const auto iz = grid_.z.nearest(z);
    if (!iy || !iz) return DiagonalTensorPair::vacuum();
    return at(*iy, *iz);
}

double MaterialMap::max_eps() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : nodes_) m = std::max(m, p.max_eps());
    return m;
}

double MaterialMap::min_eps() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : nodes_) m = std::min({m, p.eps_xx, p.eps_yy, p.eps_zz});
    return m;
}

double MaterialMap::max_index_squared() const {
    double m = 0.0;
    for (const auto& p : nodes_) m = std::max(m, p.max_eps() * p.max_mu());
    return m;
}

std::optional<Box> MaterialMap::footprint() const {
    std::optional<Box> box;
    for (std::size_t iy = 0; iy < grid_.y.count; ++iy) {
        for (std::size_t iz = 0; iz < grid_.z.count; ++iz) {
            if (is_vacuum(at(iy, iz))) continue;
            const double y = grid_.y.coordinate(iy), z = grid_.z.coordinate(iz);
            const Box b{y, y, z, z};
            box = box ? box->united(b) : b;
        }
    }
    return box;
}

void MaterialMap::write_csv(const std::filesystem::path& path) const {
    std::string out;
    out.reserve(grid_.size() * (reduced_ ? 48 : 112));
    out += reduced_ ? "y_mm,z_mm,eps,mu\n" : "y_mm,z_mm,eps_xx,eps_yy,eps_zz,mu_xx,mu_yy,mu_zz\n";
    for (std::size_t iy = 0; iy < grid_.y.count; ++iy) {
        const std::string ys = io::g9(grid_.y.coordinate(iy));
        for (std::size_t iz = 0; iz < grid_.z.count; ++iz) {
            const auto& p = at(iy, iz);
            out += ys;
            out += ',';
            out += io::g9(grid_.z.coordinate(iz));
            if (reduced_) {
                out += ',' + io::g9(p.eps_yy) + ',' + io::g9(p.mu_yy);
            } else {
                for (double v : {p.eps_xx, p.eps_yy, p.eps_zz, p.mu_xx, p.mu_yy, p.mu_zz}) {
                    out += ',';
                    out += io::g9(v);
                }
            }
            out += '\n';
        }
    }
    io::write_file(path, out);
}

Grid2D lens_grid(const LensSpec& spec, double step_mm) {
    return {Axis::symmetric(spec.radius_mm, step_mm), Axis::symmetric(spec.half_thickness_mm, step_mm)};
}

MaterialMap sample_material(const LensSpec& spec, const Grid2D& grid, const SampleOptions& options) {
    spec.validate();
    if (options.weight && !options.reduce) {
        throw ConfigError("sample_material: weighting applies only to the anisotropy-reduced profile");
    }
    const double R = spec.radius_mm, b = spec.half_thickness_mm;
    if (grid.y.step > b / 8.0 + 1e-12 || grid.z.step > b / 8.0 + 1e-12) {
        throw ConfigError("sample_material: grid spacing must be <= b/8");
    }
    if (grid.y.min() > -R + grid.y.step || grid.y.max() < R - grid.y.step || grid.z.min() > -b + grid.z.step ||
        grid.z.max() < b - grid.z.step) {
        throw ConfigError("sample_material: grid does not cover the lens footprint");
    }

    const double eps_ceiling = center_permittivity(spec);
    std::vector<DiagonalTensorPair> nodes(grid.size());
    for (std::size_t iy = 0; iy < grid.y.count; ++iy) {
        const double y = grid.y.coordinate(iy);
        if (std::abs(y) >= R - spec.edge_tolerance_mm()) continue;
        for (std::size_t iz = 0; iz < grid.z.count; ++iz) {
            const double z = grid.z.coordinate(iz);
            if (std::abs(z) > b) continue;
            const DiagonalTensorPair pair = compute_tensors(y, z, spec, options.eps_argument);
            auto& node = nodes[grid.index(iy, iz)];
            if (!options.reduce) {
                node = pair;
                continue;
            }
            double eps = std::clamp(reduce_anisotropy(pair), spec.eps_min_clamp, eps_ceiling);
            if (options.weight) eps = apply_weighting(eps, z, spec);
            node = DiagonalTensorPair::isotropic(eps);
        }
    }
    return MaterialMap(grid, std::move(nodes), options.reduce, options.weight, spec);
}

MaterialMap sample_luneburg_disk(double radius_mm, const Grid2D& grid) {
    if (!(radius_mm > 0.0)) throw ConfigError("sample_luneburg_disk: radius must be > 0");
    std::vector<DiagonalTensorPair> nodes(grid.size());
    for (std::size_t iy = 0; iy < grid.y.count; ++iy) {
        for (std::size_t iz = 0; iz < grid.z.count; ++iz) {
            const double r = std::hypot(grid.y.coordinate(iy), grid.z.coordinate(iz));
            if (r < radius_mm) nodes[grid.index(iy, iz)] = DiagonalTensorPair::isotropic(luneburg_eps(r, radius_mm));
        }
    }
    return MaterialMap(grid, std::move(nodes), true, false);
}

} // namespace flatlens
