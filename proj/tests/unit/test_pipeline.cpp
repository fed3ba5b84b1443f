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

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"
#include "flatlens/pipeline.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <string>

using namespace flatlens;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "flatlens_unit" / "pipeline" / name;
    fs::remove_all(p);
    return p;
}

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "no error";
}

// A 24 mm wide, 3 mm thick lens that simulates in seconds.
constexpr const char* kSmallIni = R"(
[lens]
radius_mm = 12
half_thickness_mm = 1.5
weight_period_mm = 3.75
sample_step_mm = 0.125

[stack]
n_layers = 5
layer_thickness_mm = 0.508
pixel_pitch_mm = 1.6
pixels_per_side = 15

[sim]
cells_per_wavelength = 10
feed_offsets_mm = 0, 2
focal_mm = 10.5
)";

PipelineConfig small() { return PipelineConfig::parse(kSmallIni); }

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

} // namespace

TEST_CASE("config defaults and canonical round trip") {
    const PipelineConfig d = PipelineConfig::parse("");
    CHECK(d.lens.radius_mm == 32.0);
    CHECK(d.lens.half_thickness_mm == 4.0);
    CHECK(d.sim.frequency_ghz == 32.0);
    CHECK(d.focal_mm == 28.0);
    CHECK(d.feed_offsets_mm == std::vector<double>{0.0, 8.0, 16.0, 24.0});
    CHECK(d.stack.n_layers == 17);
    CHECK(d.stack.pixels_per_side == 41);
    CHECK(d.weighting);
    CHECK(d.material == MaterialSource::continuous);

    const PipelineConfig s = small();
    CHECK(s.lens.radius_mm == 12.0);
    CHECK(s.feed_offsets_mm == std::vector<double>{0.0, 2.0});
    for (const auto* c : {&d, &s}) {
        const std::string text = c->to_ini();
        CHECK(PipelineConfig::parse(text).to_ini() == text);
    }

    const PipelineConfig t = PipelineConfig::parse("[sim]\npolarization = TM  # inline comment\nmaterial = discretized\n"
                                                   "padding_mm = 5\n[lens]\nweighting = off\n");
    CHECK(t.sim.polarization == Polarization::tm);
    CHECK(t.material == MaterialSource::discretized);
    CHECK(t.sim.padding_mm == 5.0);
    CHECK_FALSE(t.weighting);
}

TEST_CASE("config errors name the offending key") {
    CHECK(error_of([] { PipelineConfig::parse("[lens]\nradius = 3\n"); }).starts_with("config: lens.radius: unknown key"));
    CHECK(error_of([] { PipelineConfig::parse("[sim]\ncfl = 0.5\ncfl = 0.6\n"); }) == "config: sim.cfl: duplicate key");
    CHECK(error_of([] { PipelineConfig::parse("[sim]\nfrequency_ghz = fast\n"); })
              .starts_with("config: sim.frequency_ghz: expected a number"));
    CHECK(error_of([] { PipelineConfig::parse("[sim]\ncells_per_wavelength = 4\n"); })
              .starts_with("config: sim.cells_per_wavelength:"));
    CHECK(error_of([] { PipelineConfig::parse("[sim]\npolarization = TEM\n"); }).starts_with("config: sim.polarization:"));
    CHECK(error_of([] { PipelineConfig::parse("[sim]\nfeed_offsets_mm = 0, 40\n"); })
              .starts_with("config: sim.feed_offsets_mm:"));
    CHECK(error_of([] { PipelineConfig::parse("[sim]\nangle_step_deg = 0.7\n"); }).starts_with("config: sim.angle_step_deg:"));
    CHECK(error_of([] { PipelineConfig::parse("[stack]\npixels_per_side = 21\n"); }).starts_with("config: stack.pixels_per_side:"));
    CHECK(error_of([] { PipelineConfig::parse("[stack]\ncalibration = /nonexistent/table.csv\n"); })
              .starts_with("config: stack.calibration: file not found"));
    CHECK(error_of([] { PipelineConfig::parse("radius_mm = 3\n"); }).find("outside a section") != std::string::npos);
    CHECK(error_of([] { PipelineConfig::parse("[lens\n"); }).find("malformed section") != std::string::npos);

    // weight positivity: b = R/2 with d <= 2b
    CHECK(error_of([] { PipelineConfig::parse("[lens]\nhalf_thickness_mm = 16\nweight_period_mm = 32\n"); })
              .starts_with("config: lens.weight_period_mm:"));

    CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/flatlens.ini"), IoError);
}

TEST_CASE("config file paths resolve against the file's directory") {
    const fs::path dir = fresh_dir("paths");
    io::ensure_directory(dir);
    const fs::path table = fs::path(FLATLENS_DATA_DIR) / "calibration_placeholder.csv";
    fs::copy_file(table, dir / "cal.csv");
    io::write_file(dir / "run.ini", "[stack]\ncalibration = cal.csv\n[output]\ndirectory = results\n");
    const PipelineConfig c = PipelineConfig::load(dir / "run.ini");
    CHECK(c.calibration_file == dir / "cal.csv");
    CHECK(c.output_dir == dir / "results");
    CHECK(calibration_table(c).to_csv() == CalibrationTable::placeholder().to_csv());
}

TEST_CASE("sha-256 matches the standard test vectors") {
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("material command") {
    const fs::path dir = fresh_dir("material");
    const auto files = cmd_material(PipelineConfig{}, dir);
    CHECK(files == std::vector<std::string>{"config.ini", "material_full.csv", "material_reduced.csv",
                                            "material_summary.json", "material_weighted.csv"});
    const json s = read_json(dir / "material_summary.json");
    CHECK(s["center_eps"].get<double>() >= 15.5);
    CHECK(s["center_eps"].get<double>() <= 16.0);
    CHECK(s["center_eps_unweighted_analytic"].get<double>() == 16.0);
    CHECK(s["maps"]["weighted"]["max_eps"].get<double>() <= 16.0);

    // every emitted file is hashed in the manifest
    const json m = read_json(dir / "manifest.json");
    REQUIRE(m["files"].size() == files.size());
    for (const auto& e : m["files"]) {
        CHECK(e["sha256"].get<std::string>() == io::sha256_hex(io::read_file(dir / e["path"].get<std::string>())));
    }

    PipelineConfig off;
    off.weighting = false;
    const fs::path dir2 = fresh_dir("material_unweighted");
    cmd_material(off, dir2);
    const json s2 = read_json(dir2 / "material_summary.json");
    CHECK(s2["surface_eps"].get<double>() == doctest::Approx((2.0 - 1.0 / 64.0) * 8.0));
    CHECK(s2["surface_eps"].get<double>() > 1.0);
    CHECK(s["surface_eps"].get<double>() < s2["surface_eps"].get<double>());
}

TEST_CASE("outputs are deterministic") {
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const auto fa = cmd_material(small(), a);
    const auto fb = cmd_material(small(), b);
    REQUIRE(fa == fb);
    for (const auto& f : fa) CHECK(io::read_file(a / f) == io::read_file(b / f));
    CHECK(io::read_file(a / "manifest.json") == io::read_file(b / "manifest.json"));
}

TEST_CASE("no output after a validation failure") {
    PipelineConfig bad;
    bad.sim.cfl = 1.5;
    const fs::path dir = fresh_dir("invalid");
    CHECK_THROWS_AS(cmd_material(bad, dir), ConfigError);
    CHECK_THROWS_AS(cmd_discretize(bad, dir), ConfigError);
    CHECK_THROWS_AS(cmd_simulate(bad, dir), ConfigError);
    CHECK_THROWS_AS(cmd_scan(bad, dir), ConfigError);
    CHECK_THROWS_AS(cmd_ab_weighting(bad, dir), ConfigError);
    CHECK_FALSE(fs::exists(dir));

    // a solver failure after validation also leaves nothing behind
    PipelineConfig slow = small();
    slow.sim.max_periods = 7;
    CHECK_THROWS_AS(cmd_simulate(slow, dir), NumericalError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("discretize command") {
    const fs::path dir = fresh_dir("discretize");
    const auto files = cmd_discretize(small(), dir);
    CHECK(std::count_if(files.begin(), files.end(), [](const std::string& f) { return f.starts_with("stack/layer_"); }) == 5);
    CHECK(fs::exists(dir / "stack" / "stack_summary.json"));
    CHECK(fs::exists(dir / "material_reconstructed.csv"));
    CHECK(io::read_file(dir / "stack" / "layer_01.csv") == io::read_file(dir / "stack" / "layer_05.csv"));
}

TEST_CASE("simulate command on a small lens") {
    for (auto source : {MaterialSource::continuous, MaterialSource::discretized}) {
        PipelineConfig c = small();
        c.material = source;
        const fs::path dir = fresh_dir(std::string("simulate_") + std::string(to_string(source)));
        const auto files = cmd_simulate(c, dir);
        CHECK(std::find(files.begin(), files.end(), "phasors/phasor_Ex.csv") != files.end());
        const json r = read_json(dir / "convergence.json");
        CHECK(r["converged"].get<bool>());
        CHECK(r["final_change"].get<double>() <= c.sim.tolerance);
        CHECK(r["material"].get<std::string>() == to_string(source));
        CHECK(r["mirror_symmetry_error"].get<double>() <= 0.01);
    }
}

TEST_CASE("scan and A/B commands on a small lens") {
    const fs::path dir = fresh_dir("scan");
    cmd_scan(small(), dir);
    const auto t = io::read_csv(dir / "scan_table.csv");
    CHECK(t.header == std::vector<std::string>{"offset_mm", "peak_deg", "hpbw_deg", "sll_db", "f2b_db", "scan_loss_db"});
    REQUIRE(t.rows.size() == 2);
    CHECK(std::abs(io::to_double(t.rows[0][1])) <= 1.0);
    CHECK(io::to_double(t.rows[1][1]) < 0.0);
    CHECK(io::to_double(t.rows[0][5]) == 0.0);
    CHECK(fs::exists(dir / "pattern_offset_2mm.csv"));
    const json m = read_json(dir / "metrics_offset_2mm.json");
    for (const char* k : {"peak_deg", "hpbw_deg", "sll_db", "f2b_db", "dir2d_db", "scan_loss_db"}) CHECK(m.contains(k));

    const fs::path ab = fresh_dir("ab");
    // the unweighted small lens throws most power backwards in two mirror-image
    // lobes, so a centred feed has no unique maximum; use offset feeds only
    PipelineConfig c = small();
    c.feed_offsets_mm = {2.0, 4.0};
    c.sim.max_periods = 600;
    cmd_ab_weighting(c, ab);
    const auto cmp = io::read_csv(ab / "ab_comparison.csv");
    CHECK(cmp.header.size() == 8);
    CHECK(cmp.rows.size() == 2);
    CHECK(fs::exists(ab / "weighted" / "scan_table.csv"));
    CHECK(fs::exists(ab / "unweighted" / "scan_table.csv"));
    // same 2 mm run as the scan above; only the scan-loss reference differs
    const auto w = io::read_csv(ab / "weighted" / "scan_table.csv");
    CHECK(std::equal(t.rows[1].begin(), t.rows[1].begin() + 5, w.rows[0].begin()));
}

TEST_CASE("retrieve command") {
    const fs::path dir = fresh_dir("retrieve");
    io::ensure_directory(dir);
    std::vector<SlabResponse> rs;
    for (int i = 0; i <= 10; ++i) rs.push_back(slab_sparams(4.0, 1.0, 0.508, 30.0 + i));
    write_sweep_csv(dir / "input.csv", rs);
    const auto files = cmd_retrieve(dir / "input.csv", BranchHint::automatic(), dir / "out");
    CHECK(files == std::vector<std::string>{"retrieve_summary.json", "retrieved_params.csv"});
    const json s = read_json(dir / "out" / "retrieve_summary.json");
    CHECK(s["points"].get<int>() == 11);
    CHECK(s["low_confidence_f_ghz"].empty());
    const auto t = io::read_csv(dir / "out" / "retrieved_params.csv");
    CHECK(t.rows.size() == 11);

    CHECK_THROWS_AS(cmd_retrieve(dir / "missing.csv", BranchHint::automatic(), dir / "out"), IoError);

    // a thick slab is ambiguous without a hint
    std::vector<SlabResponse> thick{slab_sparams(4.0, 1.0, 5.0, 45.0)};
    write_sweep_csv(dir / "thick.csv", thick);
    CHECK_THROWS_AS(cmd_retrieve(dir / "thick.csv", BranchHint::automatic(), dir / "thick"), BranchAmbiguityError);
    CHECK_FALSE(fs::exists(dir / "thick"));
}
