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

#include "flatlens/farfield.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flatlens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDbFloor = -300.0;

double db20(double ratio) { return ratio > 0.0 ? std::max(kDbFloor, 20.0 * std::log10(ratio)) : kDbFloor; }

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

} // namespace

std::vector<double> angle_grid(double step_deg) {
    const double count = 360.0 / step_deg;
    const auto n = static_cast<long>(std::llround(count));
    if (!(step_deg > 0.0) || std::abs(count - static_cast<double>(n)) > 1e-9 || n % 2 != 0 || n < 4) {
        throw ConfigError("angle grid: 360/step must be an even integer");
    }
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) phi[static_cast<std::size_t>(i)] = -180.0 + static_cast<double>(i + 1) * step_deg;
    return phi;
}

std::vector<double> FarFieldPattern::magnitude() const {
    std::vector<double> m(amplitude.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(amplitude[i]);
    return m;
}

FarFieldPattern FarFieldPattern::mirrored() const {
    FarFieldPattern out = *this;
    const std::size_t n = phi_deg.size();
    for (std::size_t i = 0; i < n; ++i) {
        out.amplitude[wrap(static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(i) - 2, n)] = amplitude[i];
    }
    return out;
}

void FarFieldPattern::write_csv(const std::filesystem::path& path) const {
    const auto mag = magnitude();
    const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    std::string out = "phi_deg,re,im,mag_db\n";
    for (std::size_t i = 0; i < phi_deg.size(); ++i) {
        out += io::g9(phi_deg[i]) + ',' + io::g9(amplitude[i].real()) + ',' + io::g9(amplitude[i].imag()) + ',' +
               io::g9(peak > 0.0 ? db20(mag[i] / peak) : kDbFloor) + '\n';
    }
    io::write_file(path, out);
}

// ---------------------------------------------------------------------------
// transform

ContourIndices resolve_contour(const PhasorField& field, const ContourSpec& spec) {
    const auto& g = field.grid;
    const auto npml = static_cast<std::size_t>(field.cpml_cells);
    const Box& obj = field.object_box;
    if (g.y.count < 2 * npml + 3 || g.z.count < 2 * npml + 3) throw ConfigError("ntff: grid too small");

    // innermost node indices that still lie outside the object box
    const auto below = [](const Axis& a, double v) {
        return static_cast<std::size_t>(std::max<std::int64_t>(
            0, static_cast<std::int64_t>(std::ceil(v / a.step - 1e-9)) - 1 - a.first));
    };
    const auto above = [](const Axis& a, double v) {
        return static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(v / a.step + 1e-9)) + 1 - a.first);
    };
    const std::size_t oy0 = below(g.y, obj.y_min), oy1 = above(g.y, obj.y_max);
    const std::size_t oz0 = below(g.z, obj.z_min), oz1 = above(g.z, obj.z_max);

    ContourIndices c;
    if (spec.inset_cells < 0) {
        c.iy0 = (npml + oy0) / 2;
        c.iy1 = (g.y.count - 1 - npml + oy1 + 1) / 2;
        c.iz0 = (npml + oz0) / 2;
        c.iz1 = (g.z.count - 1 - npml + oz1 + 1) / 2;
    } else {
        const auto inset = static_cast<std::size_t>(spec.inset_cells);
        c.iy0 = npml + inset;
        c.iy1 = g.y.count - 1 - npml - inset;
        c.iz0 = npml + inset;
        c.iz1 = g.z.count - 1 - npml - inset;
    }
    if (c.iy0 <= npml || c.iz0 <= npml || c.iy1 + npml >= g.y.count - 1 || c.iz1 + npml >= g.z.count - 1) {
        throw ConfigError("ntff: contour intersects the PML");
    }
    if (c.iy0 > oy0 || c.iy1 < oy1 || c.iz0 > oz0 || c.iz1 < oz1 || c.iy0 >= c.iy1 || c.iz0 >= c.iz1) {
        throw ConfigError("ntff: contour intersects the lens or feed region");
    }
    return c;
}

FarFieldPattern ntff(const PhasorField& field, const ContourSpec& contour, double step_deg) {
    const ContourIndices c = resolve_contour(field, contour);
    const auto& g = field.grid;
    const double h = field.spacing();
    const double k = field.wavenumber_per_mm();

    struct Sample {
        double y, z, ny, nz;
        std::complex<double> j_eq;  // eta0 * (n x H)_x
        std::complex<double> u;     // out-of-plane field
    };
    std::vector<Sample> samples;
    samples.reserve(2 * (c.iy1 - c.iy0 + c.iz1 - c.iz0 + 2));

    const auto at = [&](const std::vector<std::complex<double>>& v, std::size_t iy, std::size_t iz) {
        return v[g.index(iy, iz)];
    };
    // in-plane components averaged onto the node
    const auto py_node = [&](std::size_t iy, std::size_t iz) { return 0.5 * (at(field.py, iy, iz) + at(field.py, iy, iz - 1)); };
    const auto pz_node = [&](std::size_t iy, std::size_t iz) { return 0.5 * (at(field.pz, iy, iz) + at(field.pz, iy - 1, iz)); };

    const auto add = [&](std::size_t iy, std::size_t iz, double ny, double nz, double w) {
        const std::complex<double> hy = py_node(iy, iz), hz = pz_node(iy, iz);
        Sample s{g.y.coordinate(iy), g.z.coordinate(iz), ny, nz, w * (ny * hz - nz * hy), w * at(field.u, iy, iz)};
        samples.push_back(s);
    };
    for (std::size_t iy = c.iy0; iy <= c.iy1; ++iy) {
        const double w = (iy == c.iy0 || iy == c.iy1) ? 0.5 * h : h;
        add(iy, c.iz0, 0.0, -1.0, w);
        add(iy, c.iz1, 0.0, 1.0, w);
    }
    for (std::size_t iz = c.iz0; iz <= c.iz1; ++iz) {
        const double w = (iz == c.iz0 || iz == c.iz1) ? 0.5 * h : h;
        add(c.iy0, iz, -1.0, 0.0, w);
        add(c.iy1, iz, 1.0, 0.0, w);
    }

    FarFieldPattern out;
    out.phi_deg = angle_grid(step_deg);
    out.frequency_ghz = field.frequency_ghz;
    {
        std::ostringstream os;
        os << "rectangle y=[" << g.y.coordinate(c.iy0) << ", " << g.y.coordinate(c.iy1) << "] z=["
           << g.z.coordinate(c.iz0) << ", " << g.z.coordinate(c.iz1) << "] mm";
        out.contour = os.str();
    }
    const std::complex<double> prefactor =
        (k / 4.0) * std::sqrt(2.0 / (kPi * k)) * std::polar(1.0, kPi / 4.0);
    out.amplitude.resize(out.phi_deg.size());
    for (std::size_t a = 0; a < out.phi_deg.size(); ++a) {
        const double phi = out.phi_deg[a] * kPi / 180.0;
        const double ry = std::sin(phi), rz = std::cos(phi);
        std::complex<double> acc{0.0, 0.0};
        for (const auto& s : samples) {
            const std::complex<double> term = -s.j_eq + (ry * s.ny + rz * s.nz) * s.u;
            acc += term * std::polar(1.0, k * (ry * s.y + rz * s.z));
        }
        out.amplitude[a] = prefactor * acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// metrics

std::string PatternMetrics::to_json() const {
    nlohmann::ordered_json j;
    j["peak_deg"] = peak_deg;
    j["hpbw_deg"] = hpbw_deg;
    j["sll_db"] = sll_db;
    j["f2b_db"] = f2b_db;
    j["dir2d_db"] = dir2d_db;
    j["scan_loss_db"] = scan_loss_db ? nlohmann::ordered_json(*scan_loss_db) : nlohmann::ordered_json(nullptr);
    return j.dump(2);
}

PatternMetrics pattern_metrics(const FarFieldPattern& pattern, const FarFieldPattern* reference) {
    const auto m = pattern.magnitude();
    const std::size_t n = m.size();
    if (n < 4) throw ConfigError("pattern_metrics: pattern too short");
    const double step = pattern.step_deg();

    const auto pk = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
    const double peak = m[pk];
    const double lowest = *std::min_element(m.begin(), m.end());
    if (!(peak > 0.0) || peak - lowest <= 1e-9 * peak) throw NumericalError("pattern_metrics: degenerate pattern (flat)");
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = std::min((i + n - pk) % n, (pk + n - i) % n);
        if (d > 2 && m[i] >= peak * (1.0 - 1e-9)) {
            throw NumericalError("pattern_metrics: degenerate pattern (no unique maximum)");
        }
    }
    const auto M = [&](std::ptrdiff_t i) { return m[wrap(static_cast<std::ptrdiff_t>(pk) + i, n)]; };
    const auto half = static_cast<std::ptrdiff_t>(n / 2);

    PatternMetrics out;
    out.peak_deg = pattern.phi_deg[pk];

    // half-power crossings, linear interpolation in power
    const double thr = 0.5 * peak * peak;
    const auto crossing = [&](int dir) {
        for (std::ptrdiff_t s = 1; s <= half; ++s) {
            const double p1 = M(dir * s) * M(dir * s);
            if (p1 < thr) {
                const double p0 = M(dir * (s - 1)) * M(dir * (s - 1));
                return (static_cast<double>(s - 1) + (p0 - thr) / (p0 - p1)) * step;
            }
        }
        return static_cast<double>(half) * step;
    };
    out.hpbw_deg = crossing(+1) + crossing(-1);

    // main beam spans null to null; a null is the first local minimum
    const auto null_offset = [&](int dir) {
        std::ptrdiff_t s = 0;
        while (s < half && M(dir * (s + 1)) <= M(dir * s)) ++s;
        return s;
    };
    const std::ptrdiff_t right = null_offset(+1), left = null_offset(-1);
    double side = 0.0;
    bool found = false;
    for (std::ptrdiff_t s = right + 1; s < static_cast<std::ptrdiff_t>(n) - left; ++s) {
        const double v = M(s);
        if (v >= M(s - 1) && v >= M(s + 1) && (v > M(s - 1) || v > M(s + 1))) {
            side = std::max(side, v);
            found = true;
        }
    }
    if (!found) {
        for (std::ptrdiff_t s = right + 1; s < static_cast<std::ptrdiff_t>(n) - left; ++s) side = std::max(side, M(s));
    }
    out.sll_db = db20(side / peak);
    out.f2b_db = -db20(M(half) / peak);

    double integral = 0.0;
    for (double v : m) integral += v * v;
    integral *= step * kPi / 180.0;
    out.dir2d_db = 10.0 * std::log10(2.0 * kPi * peak * peak / integral);

    if (reference) {
        const auto rm = reference->magnitude();
        const double rpeak = *std::max_element(rm.begin(), rm.end());
        out.peak_level_db = db20(peak / rpeak);
        out.scan_loss_db = -out.peak_level_db;
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweep

Point2 feed_position(const LensSpec& spec, double offset_mm, double focal_mm) {
    return {offset_mm, -(spec.half_thickness_mm + focal_mm)};
}

std::vector<ScanEntry> sweep_feeds(const LensSpec& spec, const MaterialMap& map, const std::vector<double>& offsets_mm,
                                   const ScanSettings& settings) {
    spec.validate();
    if (offsets_mm.empty()) throw ConfigError("sweep_feeds: no feed offsets");
    for (double o : offsets_mm) {
        if (!(std::abs(o) < spec.radius_mm)) throw ConfigError("sweep_feeds: feed offsets must satisfy |y| < R");
    }
    if (!(settings.focal_mm > 0.0)) throw ConfigError("sweep_feeds: focal distance must be > 0");

    std::vector<ScanEntry> out;
    out.reserve(offsets_mm.size());
    for (double o : offsets_mm) {
        const SourceSpec src = source_line(feed_position(spec, o, settings.focal_mm), 1.0, settings.sim.polarization);
        Simulation sim = build_simulation(map, settings.sim, std::span(&src, 1));
        PhasorField field = run_cw(sim);
        if (!field.converged) {
            std::ostringstream os;
            os << "sweep_feeds: offset " << o << " mm did not converge within " << settings.sim.max_periods
               << " periods (metric " << field.metric << ")";
            throw NumericalError(os.str());
        }
        ScanEntry e;
        e.offset_mm = o;
        e.pattern = ntff(field, settings.contour, settings.angle_step_deg);
        if (settings.keep_fields) e.field = std::move(field);
        out.push_back(std::move(e));
    }

    std::size_t ref = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].offset_mm == 0.0) {
            ref = i;
            break;
        }
    }
    for (auto& e : out) e.metrics = pattern_metrics(e.pattern, &out[ref].pattern);
    return out;
}

} // namespace flatlens
