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

#include "flatlens/discretizer.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace flatlens {

std::string_view to_string(CellFamily f) {
    switch (f) {
    case CellFamily::air: return "AIR";
    case CellFamily::perforated: return "PERFORATED";
    case CellFamily::patch: return "PATCH";
    }
    return "AIR";
}

CellFamily parse_family(std::string_view s) {
    if (s == "AIR") return CellFamily::air;
    if (s == "PERFORATED") return CellFamily::perforated;
    if (s == "PATCH") return CellFamily::patch;
    throw ConfigError("calibration: unknown cell family '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// CalibrationTable

CalibrationTable::CalibrationTable(std::vector<CalibrationRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw ConfigError("calibration: table is empty");
    std::vector<CellFamily> seen;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (r.family == CellFamily::air) throw ConfigError("calibration: AIR rows are implicit");
        if (!std::isfinite(r.param) || !std::isfinite(r.eps_eff) || r.eps_eff < 1.0) {
            throw ConfigError("calibration: row " + std::to_string(i) + " has invalid values");
        }
        const bool continues = i > 0 && rows_[i - 1].family == r.family;
        if (!continues) {
            if (std::find(seen.begin(), seen.end(), r.family) != seen.end()) {
                throw ConfigError("calibration: rows of a family must be contiguous");
            }
            seen.push_back(r.family);
            continue;
        }
        const auto& prev = rows_[i - 1];
        if (!(r.param > prev.param)) throw ConfigError("calibration: params must increase within a family");
        // direction fixed by the first pair of the family
        const std::size_t start = [&] {
            std::size_t s = i;
            while (s > 0 && rows_[s - 1].family == r.family) --s;
            return s;
        }();
        const double dir = (i - start >= 2) ? rows_[start + 1].eps_eff - rows_[start].eps_eff : 0.0;
        const double step = r.eps_eff - prev.eps_eff;
        if (step == 0.0 || (dir != 0.0 && (step > 0.0) != (dir > 0.0))) {
            throw ConfigError("calibration: eps_eff must be strictly monotone within a family");
        }
    }
}

CalibrationTable CalibrationTable::parse_csv(std::string_view text) {
    const io::CsvTable csv = io::parse_csv(text);
    const auto cf = csv.column("family"), cp = csv.column("param"), ce = csv.column("eps_eff");
    std::vector<CalibrationRow> rows;
    rows.reserve(csv.rows.size());
    for (const auto& r : csv.rows) {
        rows.push_back({parse_family(r[cf]), io::to_double(r[cp]), io::to_double(r[ce])});
    }
    return CalibrationTable(std::move(rows));
}

CalibrationTable CalibrationTable::load_csv(const std::filesystem::path& path) {
    return parse_csv(io::read_file(path));
}

CalibrationTable CalibrationTable::placeholder() {
    std::vector<CalibrationRow> rows;
    // perforated: hole diameter 0 .. 1.5 mm in a p = 1.6 mm cell
    for (int i = 0; i <= 30; ++i) {
        const double dh = 0.05 * i;
        const double u = dh / 1.5;
        rows.push_back({CellFamily::perforated, dh, 3.4 - (3.4 - 1.45) * u * u});
    }
    // patch: square patch width 0.2 .. 1.5 mm
    for (int i = 0; i <= 52; ++i) {
        const double w = 0.2 + 0.025 * i;
        const double u = (w - 0.2) / 1.3;
        rows.push_back({CellFamily::patch, w, 3.5 + (16.0 - 3.5) * u * u});
    }
    return CalibrationTable(std::move(rows));
}

std::string CalibrationTable::to_csv() const {
    std::string out = "family,param,eps_eff\n";
    for (const auto& r : rows_) {
        out += std::string(to_string(r.family)) + ',' + io::g9(r.param) + ',' + io::g9(r.eps_eff) + '\n';
    }
    return out;
}

std::optional<std::pair<double, double>> CalibrationTable::range(CellFamily f) const {
    std::optional<std::pair<double, double>> out;
    for (const auto& r : rows_) {
        if (r.family != f) continue;
        if (!out) out = std::pair{r.eps_eff, r.eps_eff};
        out->first = std::min(out->first, r.eps_eff);
        out->second = std::max(out->second, r.eps_eff);
    }
    return out;
}

std::size_t CalibrationTable::nearest_row(CellFamily f, double eps) const {
    std::size_t best = rows_.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].family != f) continue;
        const double d = std::abs(rows_[i].eps_eff - eps);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best == rows_.size()) throw ConfigError("calibration: family " + std::string(to_string(f)) + " absent");
    return best;
}

// ---------------------------------------------------------------------------
// assignment

CellAssignment assign_cell(double target, const CalibrationTable& table) {
    constexpr double tie_tol = 1e-12;
    const auto from_row = [&](std::size_t i, bool clamped) {
        const auto& r = table.rows()[i];
        return CellAssignment{r.family, static_cast<int>(i), r.param, r.eps_eff, clamped};
    };

    if (std::abs(target - 1.0) <= tie_tol) return {};

    const auto perforated = table.range(CellFamily::perforated);
    const auto patch = table.range(CellFamily::patch);
    if (patch && target >= patch->first - tie_tol && target <= patch->second + tie_tol) {
        return from_row(table.nearest_row(CellFamily::patch, target), false);
    }
    if (perforated && target >= perforated->first - tie_tol && target <= perforated->second + tie_tol) {
        return from_row(table.nearest_row(CellFamily::perforated, target), false);
    }

    // Outside every range: snap to the closest achievable value. Candidates are
    // ordered so that exact ties go to the perforated family.
    CellAssignment best{CellFamily::air, -1, 0.0, 1.0, true};
    double best_d = std::numeric_limits<double>::infinity();
    const auto consider = [&](CellAssignment c) {
        const double d = std::abs(c.achieved_eps - target);
        if (d < best_d - tie_tol) {
            best_d = d;
            best = c;
        }
    };
    if (perforated) consider(from_row(table.nearest_row(CellFamily::perforated, target), true));
    consider({CellFamily::air, -1, 0.0, 1.0, true});
    if (patch) consider(from_row(table.nearest_row(CellFamily::patch, target), true));
    return best;
}

// ---------------------------------------------------------------------------
// LayerStack

void StackGeometry::validate() const {
    if (n_layers < 1 || n_layers % 2 == 0) throw ConfigError("stack: n_layers must be odd and >= 1");
    if (pixels_per_side < 1 || pixels_per_side % 2 == 0) {
        throw ConfigError("stack: pixels_per_side must be odd and >= 1");
    }
    if (!(layer_thickness_mm > 0.0)) throw ConfigError("stack: layer thickness must be > 0");
    if (!(pixel_pitch_mm > 0.0)) throw ConfigError("stack: pixel pitch must be > 0");
}

LayerStack::LayerStack(StackGeometry geometry, double radius_mm, double half_thickness_mm,
                       std::vector<std::vector<double>> targets)
    : geometry_(geometry), radius_mm_(radius_mm), half_thickness_mm_(half_thickness_mm), targets_(std::move(targets)) {
    geometry_.validate();
    const auto n_pix = static_cast<std::size_t>(geometry_.pixels_per_side) * geometry_.pixels_per_side;
    if (targets_.size() != static_cast<std::size_t>(geometry_.n_layers)) {
        throw ConfigError("stack: layer count does not match geometry");
    }
    for (const auto& l : targets_) {
        if (l.size() != n_pix) throw ConfigError("stack: layer pixel count does not match geometry");
    }
}

double LayerStack::layer_center_z(int k) const { return (k - (geometry_.n_layers - 1) / 2) * geometry_.layer_thickness_mm; }

double LayerStack::layer_sample_z(int k) const {
    return std::clamp(layer_center_z(k), -half_thickness_mm_, half_thickness_mm_);
}

double LayerStack::pixel_radius(int ix, int iy) const {
    // sorted magnitudes keep the value invariant under 90 degree rotations
    const int a = std::abs(ix - center_index()), b = std::abs(iy - center_index());
    return std::hypot(std::max(a, b) * geometry_.pixel_pitch_mm, std::min(a, b) * geometry_.pixel_pitch_mm);
}

const CellAssignment& LayerStack::assignment(int layer, int ix, int iy) const {
    if (!has_assignments()) throw ConfigError("stack: unit cells have not been assigned");
    return assignments_[layer][pixel_index(ix, iy)];
}

void LayerStack::set_assignments(std::vector<std::vector<CellAssignment>> a) {
    if (a.size() != targets_.size()) throw ConfigError("stack: assignment layer count mismatch");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].size() != targets_[k].size()) throw ConfigError("stack: assignment pixel count mismatch");
    }
    assignments_ = std::move(a);
}

ClampReport LayerStack::clamp_report() const {
    ClampReport rep;
    double sq = 0.0;
    const int n = geometry_.pixels_per_side;
    for (int k = 0; k < geometry_.n_layers; ++k) {
        for (int ix = 0; ix < n; ++ix) {
            for (int iy = 0; iy < n; ++iy) {
                const auto& a = assignment(k, ix, iy);
                const double err = std::abs(a.achieved_eps - target(k, ix, iy));
                rep.max_abs_error = std::max(rep.max_abs_error, err);
                if (!in_footprint(ix, iy)) continue;
                ++rep.footprint_pixels;
                sq += err * err;
                if (a.clamped) ++rep.clamped_pixels;
            }
        }
    }
    if (rep.footprint_pixels > 0) {
        rep.clamped_fraction = static_cast<double>(rep.clamped_pixels) / static_cast<double>(rep.footprint_pixels);
        rep.rms_error = std::sqrt(sq / static_cast<double>(rep.footprint_pixels));
    }
    return rep;
}

LayerStack build_layer_stack(const MaterialMap& map, const LensSpec& spec, const StackGeometry& geometry) {
    spec.validate();
    geometry.validate();
    if (!map.reduced()) throw ConfigError("build_layer_stack: map must be anisotropy-reduced");
    const double R = spec.radius_mm, b = spec.half_thickness_mm;
    const double width = geometry.pixels_per_side * geometry.pixel_pitch_mm;
    const double height = geometry.n_layers * geometry.layer_thickness_mm;
    if (width < 2.0 * R - geometry.pixel_pitch_mm || width > 2.0 * R + 2.0 * geometry.pixel_pitch_mm) {
        throw ConfigError("build_layer_stack: pixels_per_side * pitch must match the lens diameter within one pitch");
    }
    if (height < 2.0 * b - geometry.layer_thickness_mm || height > 2.0 * b + 2.0 * geometry.layer_thickness_mm) {
        throw ConfigError("build_layer_stack: n_layers * thickness must match the lens height within one layer");
    }

    const int n = geometry.pixels_per_side;
    std::vector<std::vector<double>> targets(static_cast<std::size_t>(geometry.n_layers),
                                             std::vector<double>(static_cast<std::size_t>(n) * n, 1.0));
    LayerStack probe(geometry, R, b, targets);
    for (int k = 0; k < geometry.n_layers; ++k) {
        const double z = probe.layer_sample_z(k);
        for (int ix = 0; ix < n; ++ix) {
            for (int iy = 0; iy < n; ++iy) {
                const double rho = probe.pixel_radius(ix, iy);
                if (rho >= R) continue;
                targets[k][probe.pixel_index(ix, iy)] = map.lookup(rho, z).eps_yy;
            }
        }
    }
    return LayerStack(geometry, R, b, std::move(targets));
}

LayerStack assign_unit_cells(LayerStack stack, const CalibrationTable& table) {
    const auto& g = stack.geometry();
    std::vector<std::vector<CellAssignment>> a(static_cast<std::size_t>(g.n_layers));
    for (int k = 0; k < g.n_layers; ++k) {
        const auto& t = stack.layer_targets(k);
        a[k].reserve(t.size());
        for (double v : t) a[k].push_back(assign_cell(v, table));
    }
    stack.set_assignments(std::move(a));
    return stack;
}

namespace {

// Odd number of sub-steps per cell, so cell centres are nodes and cell edges
// fall half-way between nodes.
int odd_subdivision(double cell, double max_step) {
    int m = static_cast<int>(std::ceil(cell / max_step - 1e-9));
    if (m < 1) m = 1;
    if (m % 2 == 0) ++m;
    return m;
}

} // namespace

MaterialMap reconstruct_map(const LayerStack& stack, double max_step_mm) {
    if (!(max_step_mm > 0.0)) throw ConfigError("reconstruct_map: step must be > 0");
    if (!stack.has_assignments()) throw ConfigError("reconstruct_map: unit cells have not been assigned");
    const auto& g = stack.geometry();
    const int my = odd_subdivision(g.pixel_pitch_mm, max_step_mm);
    const int mz = odd_subdivision(g.layer_thickness_mm, max_step_mm);
    const int cy = stack.center_index();
    const int cz = (g.n_layers - 1) / 2;

    Grid2D grid;
    grid.y.step = g.pixel_pitch_mm / my;
    grid.y.first = -(static_cast<std::int64_t>(my) * cy + (my - 1) / 2);
    grid.y.count = static_cast<std::size_t>(my) * g.pixels_per_side;
    grid.z.step = g.layer_thickness_mm / mz;
    grid.z.first = -(static_cast<std::int64_t>(mz) * cz + (mz - 1) / 2);
    grid.z.count = static_cast<std::size_t>(mz) * g.n_layers;

    std::vector<DiagonalTensorPair> nodes(grid.size());
    for (std::size_t iy = 0; iy < grid.y.count; ++iy) {
        // node -> pixel column: integer division in index space is exact
        const int col = static_cast<int>((static_cast<std::int64_t>(iy)) / my);
        for (std::size_t iz = 0; iz < grid.z.count; ++iz) {
            const int layer = static_cast<int>(static_cast<std::int64_t>(iz) / mz);
            const auto& a = stack.assignment(layer, cy, col);
            if (a.family != CellFamily::air) nodes[grid.index(iy, iz)] = DiagonalTensorPair::isotropic(a.achieved_eps);
        }
    }
    return MaterialMap(grid, std::move(nodes), true, false);
}

std::vector<std::filesystem::path> export_stack(const LayerStack& stack, const std::filesystem::path& dir) {
    if (!stack.has_assignments()) throw ConfigError("export_stack: unit cells have not been assigned");
    io::ensure_directory(dir);
    const auto& g = stack.geometry();
    const int n = g.pixels_per_side;
    const int width = std::max(2, static_cast<int>(std::to_string(g.n_layers).size()));
    std::vector<std::filesystem::path> written;

    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (int k = 0; k < g.n_layers; ++k) {
        std::string out = "ix,iy,target_eps,family,param,achieved_eps,clamped\n";
        double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
        double amin = tmin, amax = -tmin;
        for (int ix = 0; ix < n; ++ix) {
            for (int iy = 0; iy < n; ++iy) {
                const double t = stack.target(k, ix, iy);
                const auto& a = stack.assignment(k, ix, iy);
                tmin = std::min(tmin, t);
                tmax = std::max(tmax, t);
                amin = std::min(amin, a.achieved_eps);
                amax = std::max(amax, a.achieved_eps);
                out += std::to_string(ix) + ',' + std::to_string(iy) + ',' + io::g9(t) + ',' +
                       std::string(to_string(a.family)) + ',' + io::g9(a.param) + ',' + io::g9(a.achieved_eps) + ',' +
                       (a.clamped ? "1" : "0") + '\n';
            }
        }
        std::string index = std::to_string(k + 1);
        index.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(index.size(), width), '0');
        const auto path = dir / ("layer_" + index + ".csv");
        io::write_file(path, out);
        written.push_back(path);
        layers.push_back({{"layer", k + 1},
                          {"z_center_mm", stack.layer_center_z(k)},
                          {"z_sample_mm", stack.layer_sample_z(k)},
                          {"target_eps_min", tmin},
                          {"target_eps_max", tmax},
                          {"achieved_eps_min", amin},
                          {"achieved_eps_max", amax}});
    }

    const ClampReport rep = stack.clamp_report();
    nlohmann::ordered_json summary;
    summary["geometry"] = {{"n_layers", g.n_layers},
                           {"layer_thickness_mm", g.layer_thickness_mm},
                           {"pixel_pitch_mm", g.pixel_pitch_mm},
                           {"pixels_per_side", g.pixels_per_side},
                           {"lens_radius_mm", stack.radius_mm()}};
    summary["clamp"] = {{"footprint_pixels", rep.footprint_pixels},
                        {"clamped_pixels", rep.clamped_pixels},
                        {"clamped_fraction", rep.clamped_fraction},
                        {"max_abs_error", rep.max_abs_error},
                        {"rms_error", rep.rms_error}};
    summary["layers"] = layers;
    const auto spath = dir / "stack_summary.json";
    io::write_file(spath, summary.dump(2) + "\n");
    written.push_back(spath);
    return written;
}

} // namespace flatlens
