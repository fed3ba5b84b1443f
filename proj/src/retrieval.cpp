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

#include "flatlens/retrieval.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/fdtd.hpp"
#include "flatlens/io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace flatlens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kJ{0.0, 1.0};

// Both quadratic terms vanish together at a matched half-wave point.
constexpr double kDegenerateTol = 1e-10;

cplx slab_index(cplx eps, cplx mu) { return std::sqrt(eps * mu); }   // principal root: Re >= 0, Im <= 0 when lossy
cplx slab_impedance(cplx eps, cplx mu) { return std::sqrt(mu / eps); }

struct ImpedanceResult {
    cplx z;
    bool low_confidence;
};

ImpedanceResult impedance(const SlabResponse& r) {
    const cplx s11 = r.s11, s21 = r.s21;
    const cplx num = (1.0 + s11) * (1.0 + s11) - s21 * s21;
    const cplx den = (1.0 - s11) * (1.0 - s11) - s21 * s21;
    if (std::abs(num) < kDegenerateTol && std::abs(den) < kDegenerateTol) return {cplx{1.0, 0.0}, true};
    if (std::abs(s11) < 1e-12) return {cplx{1.0, 0.0}, false};
    if (std::abs(den) < kDegenerateTol) throw NumericalError("retrieve_params: impedance diverges (|S11| -> 1)");
    cplx z = std::sqrt(num / den);
    if (z.real() < 0.0) z = -z;
    return {z, false};
}

// e^{-j n k0 t} recovered from the S-parameters and impedance.
cplx propagation_term(const SlabResponse& r, cplx z) {
    const cplx gamma = (z - 1.0) / (z + 1.0);
    return r.s21 / (1.0 - r.s11 * gamma);
}

EffectiveParams params_for_branch(cplx z, cplx x, double k0t, int m, bool low_conf) {
    EffectiveParams p;
    p.z = z;
    p.branch = m;
    p.low_confidence = low_conf;
    p.n = cplx{(-std::arg(x) + 2.0 * kPi * m) / k0t, std::log(std::abs(x)) / k0t};
    p.eps = p.n / z;
    p.mu = p.n * z;
    return p;
}

void check_response(const SlabResponse& r) {
    if (!(r.frequency_ghz > 0.0)) throw ConfigError("retrieval: frequency must be > 0");
    if (!(r.thickness_mm > 0.0)) throw ConfigError("retrieval: thickness must be > 0");
    if (std::abs(r.s21) < 1e-12) throw NumericalError("retrieval: opaque slab (|S21| ~ 0)");
}

} // namespace

double free_space_wavenumber(double frequency_ghz) {
    return 2.0 * kPi * frequency_ghz * 1e9 / kSpeedOfLightMmPerS;
}

SlabResponse slab_sparams(cplx eps, cplx mu, double thickness_mm, double frequency_ghz) {
    if (!(thickness_mm > 0.0)) throw ConfigError("slab_sparams: thickness must be > 0");
    if (!(frequency_ghz > 0.0)) throw ConfigError("slab_sparams: frequency must be > 0");
    const double k0 = free_space_wavenumber(frequency_ghz);
    const cplx n = slab_index(eps, mu);
    const cplx z = slab_impedance(eps, mu);
    const cplx gamma = (z - 1.0) / (z + 1.0);
    const cplx p = std::exp(-kJ * n * k0 * thickness_mm);
    const cplx den = 1.0 - gamma * gamma * p * p;
    return {frequency_ghz, gamma * (1.0 - p * p) / den, p * (1.0 - gamma * gamma) / den, thickness_mm};
}

SlabResponse stack_sparams(std::span<const SlabLayer> layers, double frequency_ghz) {
    if (layers.empty()) throw ConfigError("stack_sparams: no layers");
    const double k0 = free_space_wavenumber(frequency_ghz);
    cplx A{1.0, 0.0}, B{0.0, 0.0}, C{0.0, 0.0}, D{1.0, 0.0};
    double total = 0.0;
    for (const auto& l : layers) {
        if (!(l.thickness_mm > 0.0)) throw ConfigError("stack_sparams: layer thickness must be > 0");
        const cplx theta = slab_index(l.eps, l.mu) * k0 * l.thickness_mm;
        const cplx z = slab_impedance(l.eps, l.mu);
        const cplx a = std::cos(theta), b = kJ * z * std::sin(theta), c = kJ * std::sin(theta) / z, d = std::cos(theta);
        const cplx nA = A * a + B * c, nB = A * b + B * d, nC = C * a + D * c, nD = C * b + D * d;
        A = nA;
        B = nB;
        C = nC;
        D = nD;
        total += l.thickness_mm;
    }
    const cplx den = A + B + C + D;
    return {frequency_ghz, (A + B - C - D) / den, 2.0 / den, total};
}

EffectiveParams retrieve_params(const SlabResponse& r, BranchHint hint) {
    check_response(r);
    const double k0t = free_space_wavenumber(r.frequency_ghz) * r.thickness_mm;
    const auto [z, low_conf] = impedance(r);
    const cplx x = propagation_term(r, z);
    if (hint.m) return params_for_branch(z, x, k0t, *hint.m, low_conf);

    EffectiveParams p = params_for_branch(z, x, k0t, 0, low_conf);
    if (!(p.n.real() > 0.0)) {
        std::ostringstream os;
        os << "retrieve_params: branch m=0 gives Re(n)=" << p.n.real()
           << " at " << r.frequency_ghz << " GHz; slab is not electrically thin, supply a branch hint";
        throw BranchAmbiguityError(os.str(), {1, 2});
    }
    return p;
}

std::vector<EffectiveParams> retrieve_sweep(std::span<const SlabResponse> responses, BranchHint hint) {
    std::vector<EffectiveParams> out;
    out.reserve(responses.size());
    std::vector<double> phase;  // Re(n) k0 t per point
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const auto& r = responses[i];
        if (i > 0 && !(r.frequency_ghz > responses[i - 1].frequency_ghz)) {
            throw ConfigError("retrieve_sweep: frequencies must be strictly increasing");
        }
        if (i == 0) {
            out.push_back(retrieve_params(r, hint));
            phase.push_back(out.back().n.real() * free_space_wavenumber(r.frequency_ghz) * r.thickness_mm);
            continue;
        }
        check_response(r);
        const double k0t = free_space_wavenumber(r.frequency_ghz) * r.thickness_mm;
        const auto [z, low_conf] = impedance(r);
        const cplx x = propagation_term(r, z);

        double predicted;
        if (i == 1) {
            predicted = phase[0] * r.frequency_ghz / responses[0].frequency_ghz;
        } else {
            const double f0 = responses[i - 2].frequency_ghz, f1 = responses[i - 1].frequency_ghz;
            predicted = phase[i - 1] + (phase[i - 1] - phase[i - 2]) * (r.frequency_ghz - f1) / (f1 - f0);
        }
        const int m = static_cast<int>(std::lround((predicted + std::arg(x)) / (2.0 * kPi)));
        EffectiveParams p = params_for_branch(z, x, k0t, m, low_conf);
        const double ph = p.n.real() * k0t;
        if (std::abs(ph - phase[i - 1]) >= kPi) {
            std::ostringstream os;
            os << "retrieve_sweep: phase advances by " << std::abs(ph - phase[i - 1]) << " rad between "
               << responses[i - 1].frequency_ghz << " and " << r.frequency_ghz << " GHz (undersampled sweep)";
            throw NumericalError(os.str());
        }
        phase.push_back(ph);
        out.push_back(p);
    }
    return out;
}

std::vector<SlabResponse> read_sweep_csv(const std::filesystem::path& path) {
    const io::CsvTable t = io::read_csv(path);
    const auto cf = t.column("f_ghz"), c1r = t.column("s11_re"), c1i = t.column("s11_im"), c2r = t.column("s21_re"),
               c2i = t.column("s21_im"), ct = t.column("t_mm");
    std::vector<SlabResponse> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        out.push_back({io::to_double(row[cf]),
                       {io::to_double(row[c1r]), io::to_double(row[c1i])},
                       {io::to_double(row[c2r]), io::to_double(row[c2i])},
                       io::to_double(row[ct])});
    }
    return out;
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SlabResponse> responses) {
    std::string out = "f_ghz,s11_re,s11_im,s21_re,s21_im,t_mm\n";
    for (const auto& r : responses) {
        out += io::g9(r.frequency_ghz) + ',' + io::g9(r.s11.real()) + ',' + io::g9(r.s11.imag()) + ',' +
               io::g9(r.s21.real()) + ',' + io::g9(r.s21.imag()) + ',' + io::g9(r.thickness_mm) + '\n';
    }
    io::write_file(path, out);
}

void write_params_csv(const std::filesystem::path& path, std::span<const SlabResponse> responses,
                      std::span<const EffectiveParams> params) {
    if (responses.size() != params.size()) throw ConfigError("write_params_csv: length mismatch");
    std::string out = "f_ghz,n_re,n_im,z_re,z_im,eps_re,eps_im,mu_re,mu_im,m\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        out += io::g9(responses[i].frequency_ghz);
        for (cplx v : {p.n, p.z, p.eps, p.mu}) out += ',' + io::g9(v.real()) + ',' + io::g9(v.imag());
        out += ',' + std::to_string(p.branch) + '\n';
    }
    io::write_file(path, out);
}

} // namespace flatlens
