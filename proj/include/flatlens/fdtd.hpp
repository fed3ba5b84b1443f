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
#include "flatlens/material_map.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace flatlens {

inline constexpr double kSpeedOfLightMmPerS = 299792458.0e3;

// TE: out-of-plane E (eps_xx, mu_yy, mu_zz). TM: out-of-plane H (eps_yy, eps_zz, mu_xx).
enum class Polarization { te, tm };

std::string_view to_string(Polarization p);
Polarization parse_polarization(std::string_view s);

struct SimulationConfig {
    double frequency_ghz = 32.0;
    int cells_per_wavelength = 20;        // at the highest index in the map
    std::optional<double> padding_mm;     // default: one free-space wavelength
    int cpml_cells = 10;
    double cfl = 0.99;
    double tolerance = 1e-3;
    int max_periods = 200;
    double ramp_periods = 5.0;
    Polarization polarization = Polarization::te;

    void validate() const;
    double wavelength_mm() const { return kSpeedOfLightMmPerS / (frequency_ghz * 1e9); }
    double padding() const { return padding_mm.value_or(wavelength_mm()); }
};

enum class Waveform {
    cw,              // raised-cosine ramp then constant amplitude
    gaussian_pulse,  // Gaussian-modulated carrier at the configured frequency
};

// Soft out-of-plane line current (electric for TE, magnetic for TM) at the
// grid node nearest `position`. The phasor of the injected waveform is
// `amplitude` (e^{+jwt} convention).
struct SourceSpec {
    Point2 position;
    std::complex<double> amplitude{1.0, 0.0};
    Polarization polarization = Polarization::te;
    Waveform waveform = Waveform::cw;
};

SourceSpec source_line(Point2 position, std::complex<double> amplitude, Polarization polarization);

// Largest stable timestep on a uniform 2D grid, in seconds.
double stable_timestep(double spacing_mm, double cfl);

// Grid spacing used for a map whose squared peak index is `index_squared`.
double grid_spacing(const SimulationConfig& config, double index_squared);

// Steady-state complex amplitudes at the drive frequency. `u` is the
// out-of-plane component on nodes; `py` lives at (y_i, z_j + h/2) and `pz` at
// (y_i + h/2, z_j). For TE (u, py, pz) = (Ex, eta0*Hy, eta0*Hz); for TM
// (u, py, pz) = (eta0*Hx, -Ey, -Ez). Arrays are grid.size() long; the last
// z row of py and last y row of pz are unused.
struct PhasorField {
    Grid2D grid;
    Polarization polarization = Polarization::te;
    double frequency_ghz = 0.0;
    int cpml_cells = 0;
    Box interior;    // non-PML region
    Box object_box;  // material footprint plus sources
    std::vector<std::complex<double>> u, py, pz;

    bool converged = false;
    double metric = 0.0;
    int periods = 0;
    std::vector<double> metric_history;  // one entry per post-ramp period

    double spacing() const { return grid.y.step; }
    double wavenumber_per_mm() const;
    std::complex<double> u_at(Point2 p) const;  // nearest node

    // CSV `y_mm,z_mm,re,im` per physical component; returns written paths.
    std::vector<std::filesystem::path> write_csv(const std::filesystem::path& dir) const;
    // 32-byte little-endian header then u, py, pz as (re, im) float64 pairs.
    void write_binary(const std::filesystem::path& path) const;
    static PhasorField read_binary(const std::filesystem::path& path, double frequency_ghz);
};

// Staggered-grid leapfrog state for one simulation.
class Simulation {
public:
    Simulation(const MaterialMap& map, const SimulationConfig& config, std::span<const SourceSpec> sources);

    void step();
    // Steps until one source period has elapsed.
    void step_period();

    const SimulationConfig& config() const { return config_; }
    const Grid2D& grid() const { return grid_; }
    double spacing() const { return grid_.y.step; }
    double timestep() const { return dt_; }
    std::int64_t step_index() const { return n_; }
    int steps_per_period() const { return steps_per_period_; }
    const Box& interior() const { return interior_; }
    const Box& object_box() const { return object_box_; }

    double u(std::size_t iy, std::size_t iz) const { return u_[grid_.index(iy, iz)]; }
    double u_at(Point2 p) const;
    // Discrete electromagnetic energy sum(eps u^2 + mu (py^2 + pz^2)) * h^2 / 2.
    double energy() const;

    // Phasor of the most recently completed source period (u, py, pz).
    void begin_phasor_period();
    void end_phasor_period(PhasorField& out) const;

private:
    struct PmlProfile {
        std::vector<double> b_node, a_node, b_half, a_half;
    };

    void build_pml(std::size_t count, PmlProfile& prof) const;
    double source_waveform(const SourceSpec& s, double t) const;
    void accumulate();

    SimulationConfig config_;
    Grid2D grid_;
    Box interior_;
    Box object_box_;
    double dt_ = 0.0;
    double omega_ = 0.0;
    int steps_per_period_ = 0;
    std::int64_t n_ = 0;

    std::vector<double> u_, py_, pz_;
    std::vector<double> cu_, cpy_, cpz_;  // courant / material
    std::vector<double> psi_u_y_, psi_u_z_, psi_py_z_, psi_pz_y_;
    PmlProfile pml_y_, pml_z_;

    struct InjectedSource {
        SourceSpec spec;
        std::size_t index;
    };
    std::vector<InjectedSource> sources_;

    bool accumulating_ = false;
    int accumulated_steps_ = 0;
    std::vector<double> acc_u_re_, acc_u_im_, acc_py_re_, acc_py_im_, acc_pz_re_, acc_pz_im_;
};

Simulation build_simulation(const MaterialMap& map, const SimulationConfig& config,
                            std::span<const SourceSpec> sources);

// Drives a CW simulation to steady state. Non-convergence within max_periods is
// reported through PhasorField::converged rather than thrown.
PhasorField run_cw(Simulation& sim);

} // namespace flatlens
