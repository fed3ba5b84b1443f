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

#include "flatlens/discretizer.hpp"
#include "flatlens/farfield.hpp"
#include "flatlens/fdtd.hpp"
#include "flatlens/lens.hpp"
#include "flatlens/material_map.hpp"
#include "flatlens/retrieval.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flatlens {

enum class MaterialSource { continuous, discretized };

std::string_view to_string(MaterialSource s);

// Everything one pipeline run needs. Parsed from a sectioned key=value file:
//
//   [lens]   radius_mm half_thickness_mm weight_amplitude weight_period_mm
//            eps_min_clamp weighting eps_argument sample_step_mm
//   [stack]  n_layers layer_thickness_mm pixel_pitch_mm pixels_per_side
//            calibration
//   [sim]    frequency_ghz polarization cells_per_wavelength padding_mm
//            cpml_cells cfl tolerance max_periods ramp_periods
//            feed_offsets_mm focal_mm material angle_step_deg contour_inset
//   [output] directory
//
// Unknown keys are errors. Relative file paths resolve against the config
// file's directory.
struct PipelineConfig {
    LensSpec lens;
    bool weighting = true;
    EpsArgument eps_argument = EpsArgument::literal;
    double sample_step_mm = 0.25;  // grid step of the emitted material maps

    StackGeometry stack;
    std::optional<std::filesystem::path> calibration_file;  // placeholder table when absent

    SimulationConfig sim;
    std::vector<double> feed_offsets_mm{0.0, 8.0, 16.0, 24.0};
    double focal_mm = 28.0;
    MaterialSource material = MaterialSource::continuous;
    double angle_step_deg = 0.25;
    int contour_inset = -1;

    std::filesystem::path output_dir = "out";

    static PipelineConfig parse(std::string_view text, const std::filesystem::path& base_dir = {});
    static PipelineConfig load(const std::filesystem::path& path);

    // Throws ConfigError naming the offending key.
    void validate() const;
    // Canonical text form; parse(to_ini()) reproduces the config.
    std::string to_ini() const;
};

// Map used by simulate/scan: the continuous profile sampled at half the FDTD
// step, or the reconstructed unit-cell stack.
MaterialMap simulation_map(const PipelineConfig& config);
CalibrationTable calibration_table(const PipelineConfig& config);
LayerStack discretized_stack(const PipelineConfig& config);

std::vector<ScanEntry> run_scan(const PipelineConfig& config);

// Subcommands. Each validates first, computes in memory, then writes its files
// and updates `<dir>/manifest.json`. Returns paths relative to `dir`.
std::vector<std::string> cmd_material(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<std::string> cmd_discretize(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<std::string> cmd_simulate(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<std::string> cmd_scan(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<std::string> cmd_ab_weighting(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<std::string> cmd_retrieve(const std::filesystem::path& input, BranchHint hint,
                                      const std::filesystem::path& dir);

// Adds or refreshes entries of `<dir>/manifest.json` (path -> SHA-256).
void update_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files);

} // namespace flatlens
