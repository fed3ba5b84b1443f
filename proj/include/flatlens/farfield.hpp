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

#include "flatlens/fdtd.hpp"
#include "flatlens/lens.hpp"
#include "flatlens/material_map.hpp"

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flatlens {

// Far-field amplitude F(phi) with E_far = F(phi) exp(-jk rho) / sqrt(rho).
// phi is measured from +z (boresight) towards +y, in degrees on
// (-180, 180].
struct FarFieldPattern {
    std::vector<double> phi_deg;
    std::vector<std::complex<double>> amplitude;
    double frequency_ghz = 0.0;
    std::string contour;  // human-readable description of the integration contour

    double step_deg() const { return phi_deg.size() > 1 ? phi_deg[1] - phi_deg[0] : 0.0; }
    std::vector<double> magnitude() const;
    // Reflection phi -> -phi.
    FarFieldPattern mirrored() const;
    // CSV `phi_deg,re,im,mag_db`, mag_db = 20 log10(|F| / max |F|).
    void write_csv(const std::filesystem::path& path) const;
};

// Uniform grid over (-180, 180]; 360 / step_deg must be an even integer.
std::vector<double> angle_grid(double step_deg);

// Integration rectangle on node lines. `inset_cells` counts cells inward from
// the inner PML face; negative selects the midpoint between PML and object.
struct ContourSpec {
    int inset_cells = -1;
};

struct ContourIndices {
    std::size_t iy0 = 0, iy1 = 0, iz0 = 0, iz1 = 0;
};

ContourIndices resolve_contour(const PhasorField& field, const ContourSpec& spec);

// Equivalence-principle transform with the large-argument 2D kernel. Linear in
// the input field.
FarFieldPattern ntff(const PhasorField& field, const ContourSpec& contour = {}, double step_deg = 0.25);

struct PatternMetrics {
    double peak_deg = 0.0;
    double peak_level_db = 0.0;  // 20 log10 |F_peak|, relative to the reference peak when given
    double hpbw_deg = 0.0;
    double sll_db = 0.0;         // highest sidelobe relative to the main beam (<= 0)
    double f2b_db = 0.0;         // main beam over the direction opposite to it
    double dir2d_db = 0.0;       // 10 log10(2 pi |F_peak|^2 / integral |F|^2)
    std::optional<double> scan_loss_db;  // reference peak minus this peak, dB

    std::string to_json() const;
};

// Throws NumericalError("degenerate pattern") when there is no unique maximum.
PatternMetrics pattern_metrics(const FarFieldPattern& pattern, const FarFieldPattern* reference = nullptr);

struct ScanEntry {
    double offset_mm = 0.0;
    PatternMetrics metrics;
    FarFieldPattern pattern;
    PhasorField field;
};

struct ScanSettings {
    SimulationConfig sim;
    double focal_mm = 28.0;  // feed standoff from the flat face, z = -(b + focal)
    ContourSpec contour;
    double angle_step_deg = 0.25;
    bool keep_fields = false;
};

// One simulate + transform + metrics run per offset. The zero offset (or the
// first entry when zero is absent) is the scan-loss reference.
std::vector<ScanEntry> sweep_feeds(const LensSpec& spec, const MaterialMap& map, const std::vector<double>& offsets_mm,
                                   const ScanSettings& settings);

// Feed position for a lateral offset: (offset, -(b + focal)).
Point2 feed_position(const LensSpec& spec, double offset_mm, double focal_mm);

} // namespace flatlens
