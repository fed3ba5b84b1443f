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

#include "flatlens/grid.hpp"
#include "flatlens/lens.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace flatlens {

struct Box {
    double y_min = 0.0, y_max = 0.0;
    double z_min = 0.0, z_max = 0.0;

    Box united(const Box& o) const;
    bool contains(double y, double z) const { return y >= y_min && y <= y_max && z >= z_min && z <= z_max; }
};

// Diagonal material tensors sampled on the y'-z' plane. Reduced maps carry a
// scalar permittivity (stored isotropically) with unit permeability. Immutable.
class MaterialMap {
public:
    MaterialMap(Grid2D grid, std::vector<DiagonalTensorPair> nodes, bool reduced, bool weighted,
                std::optional<LensSpec> spec = std::nullopt);

    static MaterialMap vacuum(Grid2D grid);

    const Grid2D& grid() const { return grid_; }
    const DiagonalTensorPair& at(std::size_t iy, std::size_t iz) const { return nodes_[grid_.index(iy, iz)]; }
    // Nearest-node lookup; points off the grid are vacuum.
    DiagonalTensorPair lookup(double y, double z) const;
    // Scalar permittivity of a reduced map (eps_yy of the stored pair).
    double eps(std::size_t iy, std::size_t iz) const { return at(iy, iz).eps_yy; }

    bool reduced() const { return reduced_; }
    bool weighted() const { return weighted_; }
    const std::optional<LensSpec>& spec() const { return spec_; }

    double max_eps() const;
    double min_eps() const;
    // Largest eps*mu product over the map, i.e. the squared peak refractive index.
    double max_index_squared() const;
    // Bounding box of non-vacuum nodes; empty for an all-vacuum map.
    std::optional<Box> footprint() const;

    // Header `y_mm,z_mm,eps_xx,...,mu_zz` (full) or `y_mm,z_mm,eps,mu`
    // (reduced); y outer loop, 9 significant digits.
    void write_csv(const std::filesystem::path& path) const;

private:
    Grid2D grid_;
    std::vector<DiagonalTensorPair> nodes_;
    bool reduced_ = false;
    bool weighted_ = false;
    std::optional<LensSpec> spec_;
};

struct SampleOptions {
    bool reduce = true;
    bool weight = true;
    EpsArgument eps_argument = EpsArgument::literal;
};

// Symmetric grid spanning [-R, R] x [-b, b] at the given step.
Grid2D lens_grid(const LensSpec& spec, double step_mm);

// Node-centred evaluation of the transformed (optionally reduced and weighted)
// profile. Nodes with |y'| >= R - tol_edge or |z'| > b are vacuum. Reduced
// values are confined to [eps_min_clamp, center_permittivity(spec)].
MaterialMap sample_material(const LensSpec& spec, const Grid2D& grid, const SampleOptions& options = {});

// The uncompressed circular Luneburg profile eps = 2 - (r/R)^2 for r < R.
MaterialMap sample_luneburg_disk(double radius_mm, const Grid2D& grid);

} // namespace flatlens
