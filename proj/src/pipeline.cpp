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

#include "flatlens/pipeline.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <system_error>

namespace flatlens {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view to_string(MaterialSource s) { return s == MaterialSource::continuous ? "continuous" : "discretized"; }

namespace {

// ---------------------------------------------------------------------------
// config parsing

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw ConfigError("config: " + key + ": " + what);
}

double parse_number(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
        bad_key(key, "expected a number, got '" + v + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_key(key, "expected an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    bad_key(key, "expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = v.find(',', pos);
        const std::string item = trim(std::string_view(v).substr(pos, comma == std::string::npos ? v.npos : comma - pos));
        if (item.empty()) bad_key(key, "empty list item");
        out.push_back(parse_number(key, item));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string offset_label(double offset_mm) { return io::g9(offset_mm) + "mm"; }

void require(bool ok, const char* key, const char* what) {
    if (!ok) bad_key(key, what);
}

// ---------------------------------------------------------------------------
// staged output: files are written to a scratch directory and copied into the
// destination only once the whole command has succeeded

class Staging {
public:
    Staging() {
        std::string tmpl = (fs::temp_directory_path() / "flatlens-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw IoError("cannot create a staging directory under " + tmpl);
        root_ = tmpl;
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;
    ~Staging() {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }

    fs::path path(const fs::path& rel) const {
        const fs::path p = root_ / rel;
        io::ensure_directory(p.parent_path());
        return p;
    }
    fs::path directory(const fs::path& rel) const {
        const fs::path p = root_ / rel;
        io::ensure_directory(p);
        return p;
    }

    std::vector<std::string> commit(const fs::path& dir) const {
        std::vector<std::string> rel;
        for (const auto& e : fs::recursive_directory_iterator(root_)) {
            if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), root_).generic_string());
        }
        std::sort(rel.begin(), rel.end());
        io::ensure_directory(dir);
        for (const auto& r : rel) {
            const fs::path dst = dir / r;
            io::ensure_directory(dst.parent_path());
            std::error_code ec;
            fs::copy_file(root_ / r, dst, fs::copy_options::overwrite_existing, ec);
            if (ec) throw IoError("cannot write " + dst.string() + ": " + ec.message());
        }
        update_manifest(dir, rel);
        return rel;
    }

private:
    fs::path root_;
};

void write_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

json map_stats(const MaterialMap& m) { return {{"min_eps", m.min_eps()}, {"max_eps", m.max_eps()}}; }

json units_note() {
    return {{"length", "mm"},
            {"frequency", "GHz"},
            {"angle", "deg"},
            {"peak_deg,hpbw_deg", "deg"},
            {"sll_db,f2b_db,scan_loss_db", "dB, 20 log10 of far-field amplitude ratios"},
            {"dir2d_db", "dB, 10 log10 of a power ratio"}};
}

void write_scan(const std::vector<ScanEntry>& entries, const Staging& st, const fs::path& sub) {
    std::string table = "offset_mm,peak_deg,hpbw_deg,sll_db,f2b_db,scan_loss_db\n";
    for (const auto& e : entries) {
        const auto& m = e.metrics;
        table += io::g9(e.offset_mm) + ',' + io::g9(m.peak_deg) + ',' + io::g9(m.hpbw_deg) + ',' + io::g9(m.sll_db) +
                 ',' + io::g9(m.f2b_db) + ',' + io::g9(m.scan_loss_db.value_or(0.0)) + '\n';
        e.pattern.write_csv(st.path(sub / ("pattern_offset_" + offset_label(e.offset_mm) + ".csv")));
        io::write_file(st.path(sub / ("metrics_offset_" + offset_label(e.offset_mm) + ".json")), m.to_json() + "\n");
    }
    io::write_file(st.path(sub / "scan_table.csv"), table);
}

double symmetry_error(const PhasorField& f) {
    // max |u(y) - u(-y)| / max |u| over interior nodes
    double diff = 0.0, peak = 0.0;
    const auto& g = f.grid;
    for (std::size_t iy = 0; iy < g.y.count; ++iy) {
        const double y = g.y.coordinate(iy);
        if (y < f.interior.y_min || y > f.interior.y_max) continue;
        const auto my = g.y.nearest(-y);
        if (!my) continue;
        for (std::size_t iz = 0; iz < g.z.count; ++iz) {
            const double z = g.z.coordinate(iz);
            if (z < f.interior.z_min || z > f.interior.z_max) continue;
            const auto a = f.u[g.index(iy, iz)];
            peak = std::max(peak, std::abs(a));
            diff = std::max(diff, std::abs(a - f.u[g.index(*my, iz)]));
        }
    }
    return peak > 0.0 ? diff / peak : 0.0;
}

} // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

PipelineConfig PipelineConfig::parse(std::string_view text, const fs::path& base_dir) {
    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config: line " + std::to_string(line_no) + ": malformed section");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty()) throw ConfigError("config: line " + std::to_string(line_no) + ": key outside a section");
        const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
        if (!kv.emplace(key, value).second) bad_key(key, "duplicate key");
    }

    PipelineConfig c;
    const auto take = [&](const char* key, auto&& apply) {
        const auto it = kv.find(key);
        if (it == kv.end()) return;
        apply(std::string(key), it->second);
        kv.erase(it);
    };
    const auto number = [&](const char* key, double& dst) {
        take(key, [&](const std::string& k, const std::string& v) { dst = parse_number(k, v); });
    };
    const auto integer = [&](const char* key, int& dst) {
        take(key, [&](const std::string& k, const std::string& v) { dst = parse_int(k, v); });
    };

    number("lens.radius_mm", c.lens.radius_mm);
    number("lens.half_thickness_mm", c.lens.half_thickness_mm);
    number("lens.weight_amplitude", c.lens.weight_amplitude);
    number("lens.weight_period_mm", c.lens.weight_period_mm);
    number("lens.eps_min_clamp", c.lens.eps_min_clamp);
    number("lens.sample_step_mm", c.sample_step_mm);
    take("lens.weighting", [&](const std::string& k, const std::string& v) { c.weighting = parse_bool(k, v); });
    take("lens.eps_argument", [&](const std::string& k, const std::string& v) {
        if (v == "literal") c.eps_argument = EpsArgument::literal;
        else if (v == "preimage") c.eps_argument = EpsArgument::preimage;
        else bad_key(k, "expected literal or preimage, got '" + v + "'");
    });

    integer("stack.n_layers", c.stack.n_layers);
    number("stack.layer_thickness_mm", c.stack.layer_thickness_mm);
    number("stack.pixel_pitch_mm", c.stack.pixel_pitch_mm);
    integer("stack.pixels_per_side", c.stack.pixels_per_side);
    take("stack.calibration", [&](const std::string& k, const std::string& v) {
        if (v.empty()) bad_key(k, "empty path");
        fs::path p(v);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.calibration_file = p;
    });

    number("sim.frequency_ghz", c.sim.frequency_ghz);
    take("sim.polarization", [&](const std::string& k, const std::string& v) {
        try {
            c.sim.polarization = parse_polarization(v);
        } catch (const ConfigError&) {
            bad_key(k, "expected TE or TM, got '" + v + "'");
        }
    });
    integer("sim.cells_per_wavelength", c.sim.cells_per_wavelength);
    take("sim.padding_mm", [&](const std::string& k, const std::string& v) { c.sim.padding_mm = parse_number(k, v); });
    integer("sim.cpml_cells", c.sim.cpml_cells);
    number("sim.cfl", c.sim.cfl);
    number("sim.tolerance", c.sim.tolerance);
    integer("sim.max_periods", c.sim.max_periods);
    number("sim.ramp_periods", c.sim.ramp_periods);
    take("sim.feed_offsets_mm", [&](const std::string& k, const std::string& v) { c.feed_offsets_mm = parse_list(k, v); });
    number("sim.focal_mm", c.focal_mm);
    take("sim.material", [&](const std::string& k, const std::string& v) {
        if (v == "continuous") c.material = MaterialSource::continuous;
        else if (v == "discretized") c.material = MaterialSource::discretized;
        else bad_key(k, "expected continuous or discretized, got '" + v + "'");
    });
    number("sim.angle_step_deg", c.angle_step_deg);
    integer("sim.contour_inset", c.contour_inset);

    take("output.directory", [&](const std::string& k, const std::string& v) {
        if (v.empty()) bad_key(k, "empty path");
        fs::path p(v);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.output_dir = p;
    });

    if (!kv.empty()) bad_key(kv.begin()->first, "unknown key");
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
    return parse(io::read_file(path), path.parent_path());
}

void PipelineConfig::validate() const {
    const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    const LensSpec& L = lens;
    require(finite_pos(L.radius_mm), "lens.radius_mm", "must be > 0");
    require(finite_pos(L.half_thickness_mm), "lens.half_thickness_mm", "must be > 0");
    require(L.half_thickness_mm < L.radius_mm, "lens.half_thickness_mm", "must be < radius_mm");
    require(finite_pos(L.weight_amplitude), "lens.weight_amplitude", "must be > 0");
    require(finite_pos(L.weight_period_mm), "lens.weight_period_mm", "must be > 0");
    require(L.weight_period_mm > 2.0 * L.half_thickness_mm, "lens.weight_period_mm",
            "must exceed 2 * half_thickness_mm so the cosine weight stays positive");
    require(L.eps_min_clamp >= 1.0, "lens.eps_min_clamp", "must be >= 1");
    require(finite_pos(sample_step_mm), "lens.sample_step_mm", "must be > 0");
    require(sample_step_mm <= L.half_thickness_mm / 8.0, "lens.sample_step_mm", "must be <= half_thickness_mm / 8");
    L.validate();

    require(stack.n_layers >= 1 && stack.n_layers % 2 == 1, "stack.n_layers", "must be odd and >= 1");
    require(stack.pixels_per_side >= 1 && stack.pixels_per_side % 2 == 1, "stack.pixels_per_side",
            "must be odd and >= 1");
    require(finite_pos(stack.layer_thickness_mm), "stack.layer_thickness_mm", "must be > 0");
    require(finite_pos(stack.pixel_pitch_mm), "stack.pixel_pitch_mm", "must be > 0");
    const double width = stack.pixels_per_side * stack.pixel_pitch_mm;
    const double height = stack.n_layers * stack.layer_thickness_mm;
    require(width >= 2.0 * L.radius_mm - stack.pixel_pitch_mm && width <= 2.0 * L.radius_mm + 2.0 * stack.pixel_pitch_mm,
            "stack.pixels_per_side", "pixels_per_side * pixel_pitch_mm must match 2 * radius_mm within one pitch");
    require(height >= 2.0 * L.half_thickness_mm - stack.layer_thickness_mm &&
                height <= 2.0 * L.half_thickness_mm + 2.0 * stack.layer_thickness_mm,
            "stack.n_layers", "n_layers * layer_thickness_mm must match 2 * half_thickness_mm within one layer");
    stack.validate();
    if (calibration_file) {
        if (!fs::exists(*calibration_file)) bad_key("stack.calibration", "file not found: " + calibration_file->string());
        try {
            (void)CalibrationTable::load_csv(*calibration_file);
        } catch (const std::exception& e) {
            bad_key("stack.calibration", e.what());
        }
    }

    require(std::isfinite(sim.frequency_ghz) && sim.frequency_ghz > 0.0, "sim.frequency_ghz", "must be > 0");
    require(sim.cells_per_wavelength >= 10, "sim.cells_per_wavelength", "must be >= 10");
    require(sim.cfl > 0.0 && sim.cfl < 1.0, "sim.cfl", "must lie in (0, 1)");
    require(sim.cpml_cells >= 1, "sim.cpml_cells", "must be >= 1");
    require(finite_pos(sim.tolerance), "sim.tolerance", "must be > 0");
    require(std::isfinite(sim.ramp_periods) && sim.ramp_periods >= 0.0, "sim.ramp_periods", "must be >= 0");
    require(sim.max_periods >= static_cast<int>(std::ceil(sim.ramp_periods)) + 2, "sim.max_periods",
            "must leave at least two periods after the ramp");
    require(!sim.padding_mm || finite_pos(*sim.padding_mm), "sim.padding_mm", "must be > 0");
    sim.validate();
    require(!feed_offsets_mm.empty(), "sim.feed_offsets_mm", "must list at least one offset");
    for (double o : feed_offsets_mm) require(std::abs(o) < L.radius_mm, "sim.feed_offsets_mm", "each offset needs |y| < radius_mm");
    require(finite_pos(focal_mm), "sim.focal_mm", "must be > 0");
    require(contour_inset >= -1, "sim.contour_inset", "must be >= 0, or -1 for automatic");
    try {
        (void)angle_grid(angle_step_deg);
    } catch (const ConfigError&) {
        bad_key("sim.angle_step_deg", "360 / step must be an even integer");
    }
    require(!output_dir.empty(), "output.directory", "must not be empty");
}

std::string PipelineConfig::to_ini() const {
    std::ostringstream os;
    os << "[lens]\n"
       << "radius_mm = " << num(lens.radius_mm) << "\n"
       << "half_thickness_mm = " << num(lens.half_thickness_mm) << "\n"
       << "weight_amplitude = " << num(lens.weight_amplitude) << "\n"
       << "weight_period_mm = " << num(lens.weight_period_mm) << "\n"
       << "eps_min_clamp = " << num(lens.eps_min_clamp) << "\n"
       << "weighting = " << (weighting ? "true" : "false") << "\n"
       << "eps_argument = " << (eps_argument == EpsArgument::literal ? "literal" : "preimage") << "\n"
       << "sample_step_mm = " << num(sample_step_mm) << "\n\n";
    os << "[stack]\n"
       << "n_layers = " << stack.n_layers << "\n"
       << "layer_thickness_mm = " << num(stack.layer_thickness_mm) << "\n"
       << "pixel_pitch_mm = " << num(stack.pixel_pitch_mm) << "\n"
       << "pixels_per_side = " << stack.pixels_per_side << "\n";
    if (calibration_file) os << "calibration = " << calibration_file->generic_string() << "\n";
    os << "\n[sim]\n"
       << "frequency_ghz = " << num(sim.frequency_ghz) << "\n"
       << "polarization = " << to_string(sim.polarization) << "\n"
       << "cells_per_wavelength = " << sim.cells_per_wavelength << "\n";
    if (sim.padding_mm) os << "padding_mm = " << num(*sim.padding_mm) << "\n";
    os << "cpml_cells = " << sim.cpml_cells << "\n"
       << "cfl = " << num(sim.cfl) << "\n"
       << "tolerance = " << num(sim.tolerance) << "\n"
       << "max_periods = " << sim.max_periods << "\n"
       << "ramp_periods = " << num(sim.ramp_periods) << "\n"
       << "feed_offsets_mm = ";
    for (std::size_t i = 0; i < feed_offsets_mm.size(); ++i) os << (i ? ", " : "") << num(feed_offsets_mm[i]);
    os << "\n"
       << "focal_mm = " << num(focal_mm) << "\n"
       << "material = " << to_string(material) << "\n"
       << "angle_step_deg = " << num(angle_step_deg) << "\n"
       << "contour_inset = " << contour_inset << "\n\n";
    os << "[output]\n"
       << "directory = " << output_dir.generic_string() << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// stages

CalibrationTable calibration_table(const PipelineConfig& config) {
    return config.calibration_file ? CalibrationTable::load_csv(*config.calibration_file)
                                   : CalibrationTable::placeholder();
}

namespace {

SampleOptions sample_options(const PipelineConfig& c) {
    return {true, c.weighting, c.eps_argument};
}

LayerStack discretized_stack_at(const PipelineConfig& config, double step) {
    const MaterialMap map = sample_material(config.lens, lens_grid(config.lens, step), sample_options(config));
    return assign_unit_cells(build_layer_stack(map, config.lens, config.stack), calibration_table(config));
}

double simulation_map_step(const PipelineConfig& config) {
    return 0.5 * grid_spacing(config.sim, center_permittivity(config.lens));
}

} // namespace

LayerStack discretized_stack(const PipelineConfig& config) {
    config.validate();
    return discretized_stack_at(config, config.sample_step_mm);
}

MaterialMap simulation_map(const PipelineConfig& config) {
    config.validate();
    const double step = simulation_map_step(config);
    if (config.material == MaterialSource::discretized) return reconstruct_map(discretized_stack(config), step);
    return sample_material(config.lens, lens_grid(config.lens, step), sample_options(config));
}

std::vector<ScanEntry> run_scan(const PipelineConfig& config) {
    const MaterialMap map = simulation_map(config);
    ScanSettings s;
    s.sim = config.sim;
    s.focal_mm = config.focal_mm;
    s.contour.inset_cells = config.contour_inset;
    s.angle_step_deg = config.angle_step_deg;
    return sweep_feeds(config.lens, map, config.feed_offsets_mm, s);
}

std::vector<std::string> cmd_material(const PipelineConfig& config, const fs::path& dir) {
    config.validate();
    const Grid2D grid = lens_grid(config.lens, config.sample_step_mm);
    const SampleOptions full{false, false, config.eps_argument};
    const SampleOptions reduced{true, false, config.eps_argument};
    const SampleOptions weighted{true, true, config.eps_argument};
    const MaterialMap m_full = sample_material(config.lens, grid, full);
    const MaterialMap m_red = sample_material(config.lens, grid, reduced);
    const MaterialMap m_w = sample_material(config.lens, grid, weighted);
    const MaterialMap& active = config.weighting ? m_w : m_red;
    const double b = config.lens.half_thickness_mm;

    Staging st;
    m_full.write_csv(st.path("material_full.csv"));
    m_red.write_csv(st.path("material_reduced.csv"));
    m_w.write_csv(st.path("material_weighted.csv"));
    json summary = {
        {"weighting", config.weighting},
        {"center_eps", active.lookup(0.0, 0.0).eps_yy},
        {"surface_eps", active.lookup(0.0, b).eps_yy},
        {"center_eps_unweighted_analytic", center_permittivity(config.lens)},
        {"sample_step_mm", config.sample_step_mm},
        {"maps", {{"full", {{"min_eps", m_full.min_eps()}, {"max_eps", m_full.max_eps()}}},
                  {"reduced", map_stats(m_red)},
                  {"weighted", map_stats(m_w)}}},
    };
    write_json(st.path("material_summary.json"), summary);
    io::write_file(st.path("config.ini"), config.to_ini());
    return st.commit(dir);
}

std::vector<std::string> cmd_discretize(const PipelineConfig& config, const fs::path& dir) {
    config.validate();
    const LayerStack stack = discretized_stack(config);
    const MaterialMap rebuilt = reconstruct_map(stack, config.sample_step_mm);
    const CalibrationTable table = calibration_table(config);

    Staging st;
    export_stack(stack, st.directory("stack"));
    rebuilt.write_csv(st.path("material_reconstructed.csv"));
    io::write_file(st.path("calibration.csv"), table.to_csv());
    io::write_file(st.path("config.ini"), config.to_ini());
    return st.commit(dir);
}

std::vector<std::string> cmd_simulate(const PipelineConfig& config, const fs::path& dir) {
    config.validate();
    const MaterialMap map = simulation_map(config);
    const SourceSpec src = source_line(feed_position(config.lens, 0.0, config.focal_mm), 1.0, config.sim.polarization);
    Simulation sim = build_simulation(map, config.sim, std::span(&src, 1));
    const PhasorField field = run_cw(sim);
    if (!field.converged) {
        std::ostringstream os;
        os << "simulate: no steady state within " << config.sim.max_periods << " periods (last change " << field.metric
           << ", tolerance " << config.sim.tolerance << ")";
        throw NumericalError(os.str());
    }

    Staging st;
    field.write_csv(st.directory("phasors"));
    json report = {
        {"material", to_string(config.material)},
        {"polarization", to_string(config.sim.polarization)},
        {"frequency_ghz", config.sim.frequency_ghz},
        {"spacing_mm", sim.spacing()},
        {"timestep_s", sim.timestep()},
        {"steps_per_period", sim.steps_per_period()},
        {"grid", {{"ny", sim.grid().y.count}, {"nz", sim.grid().z.count}}},
        {"converged", field.converged},
        {"periods", field.periods},
        {"tolerance", config.sim.tolerance},
        {"final_change", field.metric},
        {"change_history", field.metric_history},
        {"mirror_symmetry_error", symmetry_error(field)},
    };
    write_json(st.path("convergence.json"), report);
    io::write_file(st.path("config.ini"), config.to_ini());
    return st.commit(dir);
}

std::vector<std::string> cmd_scan(const PipelineConfig& config, const fs::path& dir) {
    config.validate();
    const auto entries = run_scan(config);
    Staging st;
    write_scan(entries, st, ".");
    write_json(st.path("units.json"), units_note());
    io::write_file(st.path("config.ini"), config.to_ini());
    return st.commit(dir);
}

std::vector<std::string> cmd_ab_weighting(const PipelineConfig& config, const fs::path& dir) {
    config.validate();
    PipelineConfig on = config, off = config;
    on.weighting = true;
    off.weighting = false;
    const auto a = run_scan(on);
    const auto b = run_scan(off);

    Staging st;
    write_scan(a, st, "weighted");
    write_scan(b, st, "unweighted");
    std::string table =
        "offset_mm,peak_deg_weighted,peak_deg_unweighted,peak_shift_deg,sll_db_weighted,sll_db_unweighted,"
        "f2b_db_weighted,f2b_db_unweighted\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& w = a[i].metrics;
        const auto& u = b[i].metrics;
        table += io::g9(a[i].offset_mm) + ',' + io::g9(w.peak_deg) + ',' + io::g9(u.peak_deg) + ',' +
                 io::g9(std::abs(w.peak_deg - u.peak_deg)) + ',' + io::g9(w.sll_db) + ',' + io::g9(u.sll_db) + ',' +
                 io::g9(w.f2b_db) + ',' + io::g9(u.f2b_db) + '\n';
    }
    io::write_file(st.path("ab_comparison.csv"), table);
    write_json(st.path("units.json"), units_note());
    io::write_file(st.path("config.ini"), config.to_ini());
    return st.commit(dir);
}

std::vector<std::string> cmd_retrieve(const fs::path& input, BranchHint hint, const fs::path& dir) {
    if (!fs::exists(input)) throw IoError("retrieve: input not found: " + input.string());
    const auto responses = read_sweep_csv(input);
    if (responses.empty()) throw ConfigError("retrieve: input has no rows");
    const auto params = retrieve_sweep(responses, hint);

    Staging st;
    write_params_csv(st.path("retrieved_params.csv"), responses, params);
    json low = json::array();
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].low_confidence) low.push_back(responses[i].frequency_ghz);
    }
    write_json(st.path("retrieve_summary.json"),
               {{"points", params.size()}, {"first_branch", params.front().branch}, {"low_confidence_f_ghz", low}});
    return st.commit(dir);
}

void update_manifest(const fs::path& dir, const std::vector<std::string>& files) {
    const fs::path path = dir / "manifest.json";
    std::map<std::string, std::string> entries;
    if (fs::exists(path)) {
        try {
            const json old = json::parse(io::read_file(path));
            for (const auto& f : old.at("files")) entries[f.at("path").get<std::string>()] = f.at("sha256").get<std::string>();
        } catch (const json::exception& e) {
            throw IoError("manifest: cannot parse existing " + path.string() + ": " + e.what());
        }
    }
    for (const auto& f : files) {
        if (f == "manifest.json") continue;
        entries[f] = io::sha256_hex(io::read_file(dir / f));
    }
    json out = {{"files", json::array()}};
    for (const auto& [p, h] : entries) out["files"].push_back({{"path", p}, {"sha256", h}});
    io::write_file(path, out.dump(2) + "\n");
}

} // namespace flatlens
