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

#include "flatlens/lens.hpp"
#include "flatlens/material_map.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flatlens {

enum class CellFamily { air, perforated, patch };

std::string_view to_string(CellFamily f);
CellFamily parse_family(std::string_view s);

struct CalibrationRow {
    CellFamily family = CellFamily::patch;
    double param = 0.0;    // geometric parameter (patch width or hole diameter), mm
    double eps_eff = 1.0;  // effective permittivity at band centre
};

// Unit-cell calibration: per family, effective permittivity versus one
// geometric parameter. Rows of a family are contiguous, params strictly
// increasing and eps_eff strictly monotone.
class CalibrationTable {
public:
    explicit CalibrationTable(std::vector<CalibrationRow> rows);

    // CSV `family,param,eps_eff`.
    static CalibrationTable parse_csv(std::string_view text);
    static CalibrationTable load_csv(const std::filesystem::path& path);

    // Synthetic monotone table spanning [1.45, 3.4] (perforated) and
    // [3.5, 16] (patch). NOT derived from unit-cell simulations; it only
    // exercises the file format and the assignment rules.
    static CalibrationTable placeholder();

    std::string to_csv() const;

    const std::vector<CalibrationRow>& rows() const { return rows_; }
    // [min, max] effective permittivity reachable by a family.
    std::optional<std::pair<double, double>> range(CellFamily f) const;
    // Row index of the family entry nearest to `eps`.
    std::size_t nearest_row(CellFamily f, double eps) const;

private:
    std::vector<CalibrationRow> rows_;
};

struct CellAssignment {
    CellFamily family = CellFamily::air;
    int calibration_index = -1;  // -1 for air
    double param = 0.0;
    double achieved_eps = 1.0;
    bool clamped = false;

    bool operator==(const CellAssignment&) const = default;
};

CellAssignment assign_cell(double target_eps, const CalibrationTable& table);

struct StackGeometry {
    int n_layers = 17;
    double layer_thickness_mm = 0.508;
    double pixel_pitch_mm = 1.6;
    int pixels_per_side = 41;

    void validate() const;
};

struct ClampReport {
    std::size_t footprint_pixels = 0;  // pixels with centre radius < R, all layers
    std::size_t clamped_pixels = 0;
    double clamped_fraction = 0.0;
    double max_abs_error = 0.0;  // max |achieved - target| over all pixels
    double rms_error = 0.0;      // over footprint pixels
};

// n_layers planes of pixels_per_side^2 square pixels. Layer k (0-based) sits at
// z_k = (k - (n-1)/2) * thickness; pixel (ix, iy) at ((ix - c) p, (iy - c) p).
class LayerStack {
public:
    LayerStack(StackGeometry geometry, double radius_mm, double half_thickness_mm,
               std::vector<std::vector<double>> targets);

    const StackGeometry& geometry() const { return geometry_; }
    double radius_mm() const { return radius_mm_; }
    int center_index() const { return geometry_.pixels_per_side / 2; }

    // Unclamped mid-plane of layer k.
    double layer_center_z(int k) const;
    // Mid-plane used to sample the profile, clamped to |z| <= b.
    double layer_sample_z(int k) const;
    double pixel_y(int i) const { return (i - center_index()) * geometry_.pixel_pitch_mm; }
    double pixel_radius(int ix, int iy) const;
    bool in_footprint(int ix, int iy) const { return pixel_radius(ix, iy) < radius_mm_; }

    std::size_t pixel_index(int ix, int iy) const {
        return static_cast<std::size_t>(ix) * static_cast<std::size_t>(geometry_.pixels_per_side) +
               static_cast<std::size_t>(iy);
    }
    double target(int layer, int ix, int iy) const { return targets_[layer][pixel_index(ix, iy)]; }
    const std::vector<double>& layer_targets(int layer) const { return targets_[layer]; }

    bool has_assignments() const { return !assignments_.empty(); }
    const CellAssignment& assignment(int layer, int ix, int iy) const;
    void set_assignments(std::vector<std::vector<CellAssignment>> a);

    ClampReport clamp_report() const;

private:
    StackGeometry geometry_;
    double radius_mm_;
    double half_thickness_mm_;
    std::vector<std::vector<double>> targets_;
    std::vector<std::vector<CellAssignment>> assignments_;
};

// Samples a reduced map at pixel-centre radius and layer mid-plane.
LayerStack build_layer_stack(const MaterialMap& map, const LensSpec& spec, const StackGeometry& geometry);

LayerStack assign_unit_cells(LayerStack stack, const CalibrationTable& table);

// Piecewise-constant y-z cross-section through the centre pixel row, sampled
// on a grid no coarser than max_step_mm whose nodes include every pixel and
// layer centre.
MaterialMap reconstruct_map(const LayerStack& stack, double max_step_mm);

// layer_01.csv ... layer_NN.csv and stack_summary.json. Returns written paths.
std::vector<std::filesystem::path> export_stack(const LayerStack& stack, const std::filesystem::path& dir);

} // namespace flatlens
