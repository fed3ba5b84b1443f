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
#include "flatlens/material_map.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace flatlens;

namespace {

const LensSpec kSpec{};

std::filesystem::path scratch(const char* name) {
    auto p = std::filesystem::temp_directory_path() / "flatlens_unit" / name;
    std::filesystem::create_directories(p.parent_path());
    return p;
}

} // namespace

TEST_CASE("axis construction and lookup") {
    const Axis a = Axis::symmetric(4.0, 0.25);
    CHECK(a.count == 33);
    CHECK(a.min() == -4.0);
    CHECK(a.max() == 4.0);
    CHECK(*a.nearest(0.125) == 16);   // tie between 0 and 0.25 goes to 0
    CHECK(*a.nearest(-0.125) == 16);
    CHECK(*a.nearest(0.13) == 17);
    CHECK(!a.nearest(4.2).has_value());

    const Axis c = Axis::covering(-1.01, 2.0, 0.5);
    CHECK(c.min() <= -1.01);
    CHECK(c.max() >= 2.0);
    CHECK(c.coordinate(1) - c.coordinate(0) == 0.5);
}

TEST_CASE("weighted map: centre, footprint, clamp, mu") {
    const Grid2D g = lens_grid(kSpec, 0.125);
    const MaterialMap m = sample_material(kSpec, g);
    CHECK(m.reduced());
    CHECK(m.weighted());

    const double centre = m.lookup(0.0, 0.0).eps_yy;
    CHECK(centre >= 15.5);
    CHECK(centre <= 16.0);

    for (std::size_t iy = 0; iy < g.y.count; ++iy) {
        const double y = g.y.coordinate(iy);
        for (std::size_t iz = 0; iz < g.z.count; ++iz) {
            const auto& n = m.at(iy, iz);
            REQUIRE(n.mu_xx == 1.0);
            REQUIRE(n.mu_yy == 1.0);
            REQUIRE(n.mu_zz == 1.0);
            REQUIRE(n.eps_yy >= kSpec.eps_min_clamp);
            REQUIRE(n.eps_yy <= center_permittivity(kSpec));
            if (std::abs(y) >= kSpec.radius_mm - kSpec.edge_tolerance_mm()) REQUIRE(n.eps_yy == 1.0);
        }
    }
    // lookups off the grid are vacuum
    CHECK(m.lookup(40.0, 0.0).eps_yy == 1.0);
    CHECK(m.lookup(0.0, 5.0).eps_yy == 1.0);
}

TEST_CASE("flat-face value follows the weighted formula") {
    const Grid2D g = lens_grid(kSpec, 0.25);
    const MaterialMap w = sample_material(kSpec, g);
    const MaterialMap r = sample_material(kSpec, g, {true, false});
    // unweighted: eps(b) * R/b on the axis; weighted: times cos(pi b / d)
    const double reduced = (2.0 - std::pow(4.0 / 32.0, 2)) * 8.0;
    CHECK(r.lookup(0.0, 4.0).eps_yy == doctest::Approx(reduced).epsilon(1e-12));
    CHECK(r.lookup(0.0, 4.0).eps_yy > 1.0);
    CHECK(w.lookup(0.0, 4.0).eps_yy == doctest::Approx(reduced * std::cos(0.4 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("axial monotone decay of the weighted profile") {
    const Grid2D g = lens_grid(kSpec, 0.0625);
    const MaterialMap m = sample_material(kSpec, g);
    const std::size_t iy0 = *g.y.nearest(0.0);
    const std::size_t iz0 = *g.z.nearest(0.0);
    for (std::size_t iz = iz0 + 1; iz < g.z.count; ++iz) REQUIRE(m.eps(iy0, iz) <= m.eps(iy0, iz - 1));
    for (std::size_t iz = iz0; iz-- > 0;) REQUIRE(m.eps(iy0, iz) <= m.eps(iy0, iz + 1));
}

TEST_CASE("sampled maps are mirror symmetric") {
    const Grid2D g = lens_grid(kSpec, 0.25);
    const MaterialMap m = sample_material(kSpec, g, {false, false});
    const std::size_t ny = g.y.count, nz = g.z.count;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t iz = 0; iz < nz; ++iz) {
            const auto& a = m.at(iy, iz);
            const auto& b = m.at(ny - 1 - iy, iz);
            const auto& c = m.at(iy, nz - 1 - iz);
            REQUIRE(a.eps_yy == b.eps_yy);
            REQUIRE(a.eps_zz == b.eps_zz);
            REQUIRE(a.eps_yy == c.eps_yy);
        }
    }
}

TEST_CASE("full tensors are stored unreduced") {
    const Grid2D g = lens_grid(kSpec, 0.25);
    const MaterialMap m = sample_material(kSpec, g, {false, false});
    CHECK_FALSE(m.reduced());
    const auto n = m.lookup(0.0, 0.0);
    CHECK(n.eps_zz == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(n.mu_xx == doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(sample_material(kSpec, g, {false, true}), ConfigError);
}

TEST_CASE("sampling preconditions") {
    CHECK_THROWS_AS(sample_material(kSpec, lens_grid(kSpec, 1.0)), ConfigError);  // > b/8
    Grid2D small{Axis::symmetric(10.0, 0.25), Axis::symmetric(4.0, 0.25)};
    CHECK_THROWS_AS(sample_material(kSpec, small), ConfigError);
}

TEST_CASE("footprint and extrema") {
    const MaterialMap m = sample_material(kSpec, lens_grid(kSpec, 0.25));
    const auto fp = m.footprint();
    REQUIRE(fp.has_value());
    CHECK(fp->y_min > -32.0);
    CHECK(fp->y_max < 32.0);
    CHECK(m.max_eps() <= 16.0);
    CHECK(m.min_eps() == 1.0);
    CHECK(m.max_index_squared() == m.max_eps());
    CHECK_FALSE(MaterialMap::vacuum(lens_grid(kSpec, 0.25)).footprint().has_value());
}

TEST_CASE("luneburg disk") {
    const Grid2D g{Axis::symmetric(10.0, 0.5), Axis::symmetric(10.0, 0.5)};
    const MaterialMap m = sample_luneburg_disk(10.0, g);
    CHECK(m.lookup(0.0, 0.0).eps_yy == 2.0);
    CHECK(m.lookup(5.0, 0.0).eps_yy == doctest::Approx(1.75));
    CHECK(m.lookup(10.0, 0.0).eps_yy == 1.0);
}

TEST_CASE("csv export") {
    const LensSpec small{8.0, 1.0, 1.0, 3.0, 1.0};
    const Grid2D g = lens_grid(small, 0.125);
    const auto path = scratch("reduced.csv");
    sample_material(small, g).write_csv(path);
    const auto t = io::read_csv(path);
    CHECK(t.header == std::vector<std::string>{"y_mm", "z_mm", "eps", "mu"});
    CHECK(t.rows.size() == g.size());
    CHECK(io::to_double(t.rows[0][0]) == doctest::Approx(-8.0));
    CHECK(io::to_double(t.rows[1][1]) == doctest::Approx(-0.875));  // z runs fastest

    const auto full = scratch("full.csv");
    sample_material(small, g, {false, false}).write_csv(full);
    CHECK(io::read_csv(full).header.size() == 8);
}
