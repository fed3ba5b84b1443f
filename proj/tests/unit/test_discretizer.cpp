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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

using namespace flatlens;

namespace {

const LensSpec kSpec{};

const MaterialMap& weighted_map() {
    static const MaterialMap m = sample_material(kSpec, lens_grid(kSpec, 0.125));
    return m;
}

const LayerStack& default_stack() {
    static const LayerStack s =
        assign_unit_cells(build_layer_stack(weighted_map(), kSpec, StackGeometry{}), CalibrationTable::placeholder());
    return s;
}

// Half the gap between the two table values bracketing `t` in its family, or
// the distance to the nearest achievable value when `t` lies outside every
// family range.
double allowed_error(double t, const CalibrationTable& table) {
    std::vector<double> achievable{1.0};
    for (const auto& r : table.rows()) achievable.push_back(r.eps_eff);
    std::sort(achievable.begin(), achievable.end());
    for (auto f : {CellFamily::perforated, CellFamily::patch}) {
        const auto rg = table.range(f);
        if (t < rg->first || t > rg->second) continue;
        std::vector<double> v;
        for (const auto& r : table.rows())
            if (r.family == f) v.push_back(r.eps_eff);
        std::sort(v.begin(), v.end());
        const auto hi = std::lower_bound(v.begin(), v.end(), t);
        if (hi == v.begin() || *hi == t) return 0.0;
        return 0.5 * (*hi - *(hi - 1));
    }
    double best = 1e300;
    for (double a : achievable) best = std::min(best, std::abs(a - t));
    return best;
}

std::filesystem::path scratch_dir(const char* name) {
    auto p = std::filesystem::temp_directory_path() / "flatlens_unit" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("placeholder calibration table") {
    const auto t = CalibrationTable::placeholder();
    const auto perf = *t.range(CellFamily::perforated);
    const auto patch = *t.range(CellFamily::patch);
    CHECK(perf.first == doctest::Approx(1.45).epsilon(1e-14));
    CHECK(perf.second == doctest::Approx(3.4).epsilon(1e-14));
    CHECK(patch.first == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(patch.second == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(t.rows().size() == 31 + 53);

    const auto again = CalibrationTable::parse_csv(t.to_csv());
    REQUIRE(again.rows().size() == t.rows().size());
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        CHECK(again.rows()[i].family == t.rows()[i].family);
        CHECK(again.rows()[i].eps_eff == doctest::Approx(t.rows()[i].eps_eff).epsilon(1e-8));
    }
}

TEST_CASE("shipped calibration file matches the placeholder") {
    const auto shipped = CalibrationTable::load_csv(std::filesystem::path(FLATLENS_DATA_DIR) / "calibration_placeholder.csv");
    CHECK(shipped.to_csv() == CalibrationTable::placeholder().to_csv());
}

TEST_CASE("calibration table validation") {
    CHECK_THROWS_AS(CalibrationTable({}), ConfigError);
    CHECK_THROWS_AS(CalibrationTable::parse_csv("family,param,eps_eff\nPATCH,0.2,3.5\nPATCH,0.3,3.5\n"), ConfigError);
    CHECK_THROWS_AS(CalibrationTable::parse_csv("family,param,eps_eff\nPATCH,0.3,3.5\nPATCH,0.2,4\n"), ConfigError);
    CHECK_THROWS_AS(CalibrationTable::parse_csv("family,param,eps_eff\nSLOT,0.3,3.5\n"), ConfigError);
    CHECK_THROWS_AS(CalibrationTable::parse_csv("family,param,eps_eff\nPATCH,0.2,3.5\nPATCH,0.3,4\nPATCH,0.4,3.8\n"),
                    ConfigError);
    CHECK_NOTHROW(CalibrationTable::parse_csv("family,param,eps_eff\nPERFORATED,0,3.4\nPERFORATED,1,2\n"));
}

TEST_CASE("cell assignment examples") {
    const auto t = CalibrationTable::placeholder();

    auto a = assign_cell(16.0, t);
    CHECK(a.family == CellFamily::patch);
    CHECK(a.achieved_eps == doctest::Approx(16.0).epsilon(1e-14));
    CHECK_FALSE(a.clamped);
    CHECK(a.calibration_index == static_cast<int>(t.rows().size()) - 1);

    a = assign_cell(1.0, t);
    CHECK(a.family == CellFamily::air);
    CHECK(a.achieved_eps == 1.0);
    CHECK_FALSE(a.clamped);

    a = assign_cell(3.45, t);  // equidistant from 3.4 and 3.5
    CHECK(a.family == CellFamily::perforated);
    CHECK(a.achieved_eps == doctest::Approx(3.4).epsilon(1e-14));
    CHECK(a.clamped);

    a = assign_cell(3.48, t);
    CHECK(a.family == CellFamily::patch);
    CHECK(a.achieved_eps == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(a.clamped);

    a = assign_cell(1.2, t);
    CHECK(a.family == CellFamily::air);
    CHECK(a.clamped);

    a = assign_cell(1.3, t);
    CHECK(a.family == CellFamily::perforated);
    CHECK(a.achieved_eps == doctest::Approx(1.45).epsilon(1e-14));
    CHECK(a.clamped);

    a = assign_cell(20.0, t);
    CHECK(a.family == CellFamily::patch);
    CHECK(a.clamped);
}

TEST_CASE("assignment invariants over random targets") {
    const auto t = CalibrationTable::placeholder();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(1.0, 17.0);
    for (int i = 0; i < 20000; ++i) {
        const double target = u(rng);
        const auto a = assign_cell(target, t);
        switch (a.family) {
        case CellFamily::patch:
            REQUIRE(a.achieved_eps >= 3.5 - 1e-12);
            REQUIRE(a.achieved_eps <= 16.0 + 1e-12);
            break;
        case CellFamily::perforated:
            REQUIRE(a.achieved_eps >= 1.45 - 1e-12);
            REQUIRE(a.achieved_eps <= 3.4 + 1e-12);
            break;
        case CellFamily::air:
            REQUIRE(a.achieved_eps == 1.0);
            break;
        }
        const bool inside = (target >= 1.45 && target <= 3.4) || (target >= 3.5 && target <= 16.0);
        REQUIRE(a.clamped == !inside);
        REQUIRE(std::abs(a.achieved_eps - target) <= allowed_error(target, t) + 1e-12);
        REQUIRE(assign_cell(target, t) == a);
    }
}

TEST_CASE("default stack geometry and symmetry") {
    const LayerStack& s = default_stack();
    const auto& g = s.geometry();
    const int n = g.pixels_per_side, c = s.center_index(), mid = g.n_layers / 2;

    const double centre = s.target(mid, c, c);
    CHECK(centre >= 15.5);
    CHECK(centre <= 16.0);
    CHECK(s.target(mid, 0, 0) == 1.0);
    CHECK(s.assignment(mid, 0, 0).family == CellFamily::air);
    CHECK(s.layer_sample_z(0) == -4.0);
    CHECK(s.layer_sample_z(g.n_layers - 1) == 4.0);
    CHECK(s.layer_center_z(mid) == 0.0);

    for (int k = 0; k < g.n_layers; ++k) {
        CHECK(s.layer_targets(k) == s.layer_targets(g.n_layers - 1 - k));
        for (int ix = 0; ix < n; ++ix) {
            for (int iy = 0; iy < n; ++iy) {
                REQUIRE(s.target(k, ix, iy) == s.target(k, 2 * c - iy, ix));  // 90 degree rotation
                if (!s.in_footprint(ix, iy)) REQUIRE(s.target(k, ix, iy) == 1.0);
                REQUIRE(s.target(k, ix, iy) >= 1.0);
            }
        }
    }
}

TEST_CASE("assignment idempotence and clamp baseline") {
    const LayerStack& s = default_stack();
    const LayerStack again = assign_unit_cells(s, CalibrationTable::placeholder());
    const auto& g = s.geometry();
    for (int k = 0; k < g.n_layers; ++k)
        for (int ix = 0; ix < g.pixels_per_side; ++ix)
            for (int iy = 0; iy < g.pixels_per_side; ++iy) REQUIRE(again.assignment(k, ix, iy) == s.assignment(k, ix, iy));

    const ClampReport rep = s.clamp_report();
    MESSAGE("clamped fraction " << rep.clamped_fraction << " (" << rep.clamped_pixels << " of " << rep.footprint_pixels
                                << "), rms error " << rep.rms_error);
    CHECK(rep.footprint_pixels > 0);
    CHECK(rep.clamped_fraction < 0.15);
}

TEST_CASE("geometry inconsistency is rejected") {
    StackGeometry g;
    g.pixels_per_side = 31;
    CHECK_THROWS_AS(build_layer_stack(weighted_map(), kSpec, g), ConfigError);
    g = StackGeometry{};
    g.n_layers = 11;
    CHECK_THROWS_AS(build_layer_stack(weighted_map(), kSpec, g), ConfigError);
    g.n_layers = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.n_layers = 16;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    const MaterialMap full = sample_material(kSpec, lens_grid(kSpec, 0.25), {false, false});
    CHECK_THROWS_AS(build_layer_stack(full, kSpec, StackGeometry{}), ConfigError);
}

TEST_CASE("reconstruction at pixel and layer centres") {
    const LayerStack& s = default_stack();
    const MaterialMap m = reconstruct_map(s, 0.1);
    const auto& g = s.geometry();
    const int c = s.center_index();
    const auto table = CalibrationTable::placeholder();
    double sq_err = 0.0, sq_bound = 0.0;
    int count = 0;
    for (int k = 0; k < g.n_layers; ++k) {
        for (int col = 0; col < g.pixels_per_side; ++col) {
            const double y = s.pixel_y(col);
            const double z = s.layer_center_z(k);
            const auto& a = s.assignment(k, c, col);
            REQUIRE(m.lookup(y, z).eps_yy == a.achieved_eps);
            if (!s.in_footprint(c, col)) continue;
            const double target = weighted_map().lookup(std::abs(y), s.layer_sample_z(k)).eps_yy;
            const double err = a.achieved_eps - target;
            const double bound = allowed_error(target, table);
            REQUIRE(std::abs(err) <= bound + 1e-12);
            sq_err += err * err;
            sq_bound += bound * bound;
            ++count;
        }
    }
    REQUIRE(count > 0);
    CHECK(std::sqrt(sq_err / count) <= std::sqrt(sq_bound / count) + 1e-12);

    // the reconstruction grid is mirror symmetric about both axes
    const auto& rg = m.grid();
    CHECK(rg.y.min() == doctest::Approx(-rg.y.max()));
    CHECK(rg.z.min() == doctest::Approx(-rg.z.max()));
}

TEST_CASE("all-air stack reconstructs to vacuum") {
    StackGeometry g{3, 1.0, 1.0, 5};
    LayerStack s(g, 2.0, 1.0, std::vector<std::vector<double>>(3, std::vector<double>(25, 1.0)));
    s = assign_unit_cells(std::move(s), CalibrationTable::placeholder());
    const MaterialMap m = reconstruct_map(s, 0.2);
    CHECK(m.max_eps() == 1.0);
    CHECK_FALSE(m.footprint().has_value());
}

TEST_CASE("export stack") {
    const auto dir = scratch_dir("stack");
    const auto files = export_stack(default_stack(), dir);
    CHECK(files.size() == 18);
    CHECK(std::filesystem::exists(dir / "layer_01.csv"));
    CHECK(std::filesystem::exists(dir / "layer_17.csv"));
    CHECK(std::filesystem::exists(dir / "stack_summary.json"));
    const auto t = io::read_csv(dir / "layer_05.csv");
    CHECK(t.header == std::vector<std::string>{"ix", "iy", "target_eps", "family", "param", "achieved_eps", "clamped"});
    CHECK(t.rows.size() == 41 * 41);
    for (int i = 1; i <= 17; ++i) {
        char a[32], b[32];
        std::snprintf(a, sizeof a, "layer_%02d.csv", i);
        std::snprintf(b, sizeof b, "layer_%02d.csv", 18 - i);
        REQUIRE(io::read_file(dir / a) == io::read_file(dir / b));
    }
    CHECK_THROWS_AS(export_stack(build_layer_stack(weighted_map(), kSpec, StackGeometry{}), dir), ConfigError);
}
