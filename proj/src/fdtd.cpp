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

#include "flatlens/fdtd.hpp"

#include "flatlens/errors.hpp"
#include "flatlens/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <string>

namespace flatlens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPmlGrading = 3;
// CFS shift at the inner PML face, as a fraction of the angular frequency.
constexpr double kPmlAlphaOverOmega = 0.05;

double sqr(double x) { return x * x; }

} // namespace

std::string_view to_string(Polarization p) { return p == Polarization::te ? "TE" : "TM"; }

Polarization parse_polarization(std::string_view s) {
    if (s == "TE" || s == "te") return Polarization::te;
    if (s == "TM" || s == "tm") return Polarization::tm;
    throw ConfigError("unknown polarization '" + std::string(s) + "' (expected TE or TM)");
}

void SimulationConfig::validate() const {
    if (!(frequency_ghz > 0.0) || !std::isfinite(frequency_ghz)) throw ConfigError("sim: frequency must be > 0");
    if (cells_per_wavelength < 10) throw ConfigError("sim: cells_per_wavelength must be >= 10");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("sim: CFL factor must lie in (0, 1)");
    if (cpml_cells < 1) throw ConfigError("sim: cpml_cells must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("sim: tolerance must be > 0");
    if (max_periods < 1) throw ConfigError("sim: max_periods must be >= 1");
    if (!(ramp_periods >= 0.0)) throw ConfigError("sim: ramp_periods must be >= 0");
    if (padding_mm && !(*padding_mm > 0.0)) throw ConfigError("sim: padding must be > 0");
    if (max_periods < static_cast<int>(std::ceil(ramp_periods)) + 2) {
        throw ConfigError("sim: max_periods must leave at least two periods after the ramp");
    }
}

SourceSpec source_line(Point2 position, std::complex<double> amplitude, Polarization polarization) {
    return SourceSpec{position, amplitude, polarization, Waveform::cw};
}

double stable_timestep(double spacing_mm, double cfl) {
    return cfl * spacing_mm / (kSpeedOfLightMmPerS * std::numbers::sqrt2);
}

double grid_spacing(const SimulationConfig& config, double index_squared) {
    return config.wavelength_mm() / (config.cells_per_wavelength * std::sqrt(std::max(1.0, index_squared)));
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(const MaterialMap& map, const SimulationConfig& config, std::span<const SourceSpec> sources)
    : config_(config) {
    config_.validate();
    if (map.max_eps() < 1.0) throw ConfigError("build_simulation: map maximum permittivity is below 1");
    for (const auto& s : sources) {
        if (s.polarization != config_.polarization) {
            throw ConfigError("build_simulation: source polarization differs from the simulation polarization");
        }
    }

    const double h = grid_spacing(config_, map.max_index_squared());
    const int npml = config_.cpml_cells;

    object_box_ = {map.grid().y.min(), map.grid().y.max(), map.grid().z.min(), map.grid().z.max()};
    for (const auto& s : sources) object_box_ = object_box_.united({s.position.y, s.position.y, s.position.z, s.position.z});

    const double pad = config_.padding();
    Axis ay = Axis::covering(object_box_.y_min - pad, object_box_.y_max + pad, h);
    Axis az = Axis::covering(object_box_.z_min - pad, object_box_.z_max + pad, h);
    interior_ = {ay.min(), ay.max(), az.min(), az.max()};
    ay.first -= npml;
    ay.count += 2 * static_cast<std::size_t>(npml);
    az.first -= npml;
    az.count += 2 * static_cast<std::size_t>(npml);
    grid_ = {ay, az};

    const double period = 1.0 / (config_.frequency_ghz * 1e9);
    steps_per_period_ = static_cast<int>(std::ceil(period / stable_timestep(h, config_.cfl)));
    steps_per_period_ = std::max(steps_per_period_, 4);
    dt_ = period / steps_per_period_;
    omega_ = 2.0 * kPi * config_.frequency_ghz * 1e9;
    const double S = kSpeedOfLightMmPerS * dt_ / h;

    const std::size_t n = grid_.size();
    u_.assign(n, 0.0);
    py_.assign(n, 0.0);
    pz_.assign(n, 0.0);
    cu_.assign(n, 0.0);
    cpy_.assign(n, 0.0);
    cpz_.assign(n, 0.0);
    psi_u_y_.assign(n, 0.0);
    psi_u_z_.assign(n, 0.0);
    psi_py_z_.assign(n, 0.0);
    psi_pz_y_.assign(n, 0.0);

    const bool te = config_.polarization == Polarization::te;
    for (std::size_t iy = 0; iy < grid_.y.count; ++iy) {
        const double y = grid_.y.coordinate(iy);
        for (std::size_t iz = 0; iz < grid_.z.count; ++iz) {
            const double z = grid_.z.coordinate(iz);
            const std::size_t k = grid_.index(iy, iz);
            const auto at_u = map.lookup(y, z);
            const auto at_py = map.lookup(y, z + 0.5 * h);
            const auto at_pz = map.lookup(y + 0.5 * h, z);
            cu_[k] = S / (te ? at_u.eps_xx : at_u.mu_xx);
            cpy_[k] = S / (te ? at_py.mu_yy : at_py.eps_yy);
            cpz_[k] = S / (te ? at_pz.mu_zz : at_pz.eps_zz);
        }
    }

    build_pml(grid_.y.count, pml_y_);
    build_pml(grid_.z.count, pml_z_);

    for (const auto& s : sources) {
        if (!interior_.contains(s.position.y, s.position.z)) {
            throw ConfigError("build_simulation: source lies inside the PML");
        }
        const auto iy = grid_.y.nearest(s.position.y);
        const auto iz = grid_.z.nearest(s.position.z);
        sources_.push_back({s, grid_.index(*iy, *iz)});
    }
}

void Simulation::build_pml(std::size_t count, PmlProfile& prof) const {
    const int npml = config_.cpml_cells;
    const double h = spacing();
    const double sigma_max = 0.8 * (kPmlGrading + 1) * kSpeedOfLightMmPerS / h;  // sigma / eps0, 1/s
    const double alpha_max = kPmlAlphaOverOmega * omega_;
    const double last = static_cast<double>(count - 1);

    const auto coeffs = [&](double pos, double& b, double& a) {
        const double depth = std::max({static_cast<double>(npml) - pos, pos - (last - npml), 0.0});
        if (depth <= 0.0) {
            b = 0.0;
            a = 0.0;
            return;
        }
        const double x = depth / npml;
        const double sigma = sigma_max * std::pow(x, kPmlGrading);
        const double alpha = alpha_max * (1.0 - x);
        b = std::exp(-(sigma + alpha) * dt_);
        a = sigma > 0.0 ? sigma / (sigma + alpha) * (b - 1.0) : 0.0;
    };

    prof.b_node.assign(count, 0.0);
    prof.a_node.assign(count, 0.0);
    prof.b_half.assign(count, 0.0);
    prof.a_half.assign(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        coeffs(static_cast<double>(i), prof.b_node[i], prof.a_node[i]);
        coeffs(static_cast<double>(i) + 0.5, prof.b_half[i], prof.a_half[i]);
    }
}

double Simulation::source_waveform(const SourceSpec& s, double t) const {
    const double carrier = s.amplitude.real() * std::cos(omega_ * t) - s.amplitude.imag() * std::sin(omega_ * t);
    const double period = 2.0 * kPi / omega_;
    if (s.waveform == Waveform::gaussian_pulse) {
        const double tau = period;
        const double t0 = 4.0 * tau;
        return carrier * std::exp(-sqr((t - t0) / tau));
    }
    const double ramp_t = config_.ramp_periods * period;
    if (ramp_t > 0.0 && t < ramp_t) return carrier * 0.5 * (1.0 - std::cos(kPi * t / ramp_t));
    return carrier;
}

void Simulation::step() {
    const std::size_t ny = grid_.y.count, nz = grid_.z.count;
    const auto npml = static_cast<std::size_t>(config_.cpml_cells);
    double* u = u_.data();
    double* py = py_.data();
    double* pz = pz_.data();
    const double* cu = cu_.data();
    const double* cpy = cpy_.data();
    const double* cpz = cpz_.data();

    // in-plane components, half step
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ny; ++i) {
        const std::size_t r = i * nz;
        for (std::size_t j = 0; j + 1 < nz; ++j) py[r + j] -= cpy[r + j] * (u[r + j + 1] - u[r + j]);
        if (i + 1 < ny) {
            const std::size_t rn = r + nz;
            for (std::size_t j = 0; j < nz; ++j) pz[r + j] += cpz[r + j] * (u[rn + j] - u[r + j]);
        }
    }
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ny; ++i) {
        const std::size_t r = i * nz;
        for (std::size_t j = 0; j + 1 < nz; ++j) {
            if (j >= npml && j + 1 + npml < nz) {
                j = nz - 2 - npml;  // skip to the upper strip
                continue;
            }
            const std::size_t k = r + j;
            psi_py_z_[k] = pml_z_.b_half[j] * psi_py_z_[k] + pml_z_.a_half[j] * (u[k + 1] - u[k]);
            py[k] -= cpy[k] * psi_py_z_[k];
        }
    }
    for (std::size_t i = 0; i + 1 < ny; ++i) {
        if (i >= npml && i + 1 + npml < ny) {
            i = ny - 2 - npml;
            continue;
        }
        const std::size_t r = i * nz;
        for (std::size_t j = 0; j < nz; ++j) {
            const std::size_t k = r + j;
            psi_pz_y_[k] = pml_y_.b_half[i] * psi_pz_y_[k] + pml_y_.a_half[i] * (u[k + nz] - u[k]);
            pz[k] += cpz[k] * psi_pz_y_[k];
        }
    }

    // out-of-plane component, full step
#pragma omp parallel for schedule(static)
    for (std::size_t i = 1; i < ny - 1; ++i) {
        const std::size_t r = i * nz;
        const std::size_t rp = r - nz;
        for (std::size_t j = 1; j + 1 < nz; ++j) {
            u[r + j] += cu[r + j] * ((pz[r + j] - pz[rp + j]) - (py[r + j] - py[r + j - 1]));
        }
    }
    for (std::size_t i = 1; i + 1 < ny; ++i) {
        const std::size_t r = i * nz;
        const bool in_y = i < npml || i + 1 + npml > ny;
        for (std::size_t j = 1; j + 1 < nz; ++j) {
            const std::size_t k = r + j;
            if (in_y) {
                psi_u_y_[k] = pml_y_.b_node[i] * psi_u_y_[k] + pml_y_.a_node[i] * (pz[k] - pz[k - nz]);
                u[k] += cu[k] * psi_u_y_[k];
            }
            if (j < npml || j + 1 + npml > nz) {
                psi_u_z_[k] = pml_z_.b_node[j] * psi_u_z_[k] + pml_z_.a_node[j] * (py[k] - py[k - 1]);
                u[k] -= cu[k] * psi_u_z_[k];
            } else if (!in_y) {
                j = nz - 1 - npml;  // jump to the upper strip
            }
        }
    }

    const double t_half = (static_cast<double>(n_) + 0.5) * dt_;
    const double inv_h = 1.0 / spacing();
    for (const auto& s : sources_) u[s.index] -= cu[s.index] * source_waveform(s.spec, t_half) * inv_h;

    ++n_;
    if (accumulating_) accumulate();
}

void Simulation::step_period() {
    for (int k = 0; k < steps_per_period_; ++k) step();
}

void Simulation::accumulate() {
    const double tu = static_cast<double>(n_) * dt_;
    const double tp = (static_cast<double>(n_) - 0.5) * dt_;
    const double cu = std::cos(omega_ * tu), su = std::sin(omega_ * tu);
    const double cp = std::cos(omega_ * tp), sp = std::sin(omega_ * tp);
    const std::size_t n = u_.size();
    const double* u = u_.data();
    const double* py = py_.data();
    const double* pz = pz_.data();
    double* ur = acc_u_re_.data();
    double* ui = acc_u_im_.data();
    double* yr = acc_py_re_.data();
    double* yi = acc_py_im_.data();
    double* zr = acc_pz_re_.data();
    double* zi = acc_pz_im_.data();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) {
        ur[k] += u[k] * cu;
        ui[k] -= u[k] * su;
        yr[k] += py[k] * cp;
        yi[k] -= py[k] * sp;
        zr[k] += pz[k] * cp;
        zi[k] -= pz[k] * sp;
    }
    ++accumulated_steps_;
}

void Simulation::begin_phasor_period() {
    const std::size_t n = u_.size();
    for (auto* v : {&acc_u_re_, &acc_u_im_, &acc_py_re_, &acc_py_im_, &acc_pz_re_, &acc_pz_im_}) v->assign(n, 0.0);
    accumulated_steps_ = 0;
    accumulating_ = true;
}

void Simulation::end_phasor_period(PhasorField& out) const {
    if (accumulated_steps_ < 3) throw NumericalError("phasor window too short");
    const double scale = 2.0 / accumulated_steps_;
    const std::size_t n = u_.size();
    out.grid = grid_;
    out.polarization = config_.polarization;
    out.frequency_ghz = config_.frequency_ghz;
    out.cpml_cells = config_.cpml_cells;
    out.interior = interior_;
    out.object_box = object_box_;
    out.u.resize(n);
    out.py.resize(n);
    out.pz.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.u[k] = {scale * acc_u_re_[k], scale * acc_u_im_[k]};
        out.py[k] = {scale * acc_py_re_[k], scale * acc_py_im_[k]};
        out.pz[k] = {scale * acc_pz_re_[k], scale * acc_pz_im_[k]};
    }
}

double Simulation::u_at(Point2 p) const {
    const auto iy = grid_.y.nearest(p.y);
    const auto iz = grid_.z.nearest(p.z);
    if (!iy || !iz) throw DomainError("probe outside the simulation grid");
    return u(*iy, *iz);
}

double Simulation::energy() const {
    const double S = kSpeedOfLightMmPerS * dt_ / spacing();
    double e = 0.0;
    for (std::size_t k = 0; k < u_.size(); ++k) {
        e += (S / cu_[k]) * sqr(u_[k]) + (S / cpy_[k]) * sqr(py_[k]) + (S / cpz_[k]) * sqr(pz_[k]);
    }
    return 0.5 * e * spacing() * spacing();
}

Simulation build_simulation(const MaterialMap& map, const SimulationConfig& config,
                            std::span<const SourceSpec> sources) {
    return Simulation(map, config, sources);
}

// ---------------------------------------------------------------------------
// run_cw

namespace {

bool all_finite(const PhasorField& f) {
    for (const auto* v : {&f.u, &f.py, &f.pz}) {
        for (const auto& c : *v) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        }
    }
    return true;
}

double relative_change(const PhasorField& cur, const PhasorField& prev) {
    double num = 0.0, den = 0.0;
    for (auto [a, b] : {std::pair{&cur.u, &prev.u}, std::pair{&cur.py, &prev.py}, std::pair{&cur.pz, &prev.pz}}) {
        for (std::size_t k = 0; k < a->size(); ++k) {
            num += std::norm((*a)[k] - (*b)[k]);
            den += std::norm((*a)[k]);
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : 1.0;
    return std::sqrt(num / den);
}

} // namespace

PhasorField run_cw(Simulation& sim) {
    const auto& cfg = sim.config();
    const int ramp = static_cast<int>(std::ceil(cfg.ramp_periods));
    int periods = 0;
    for (; periods < ramp && periods < cfg.max_periods; ++periods) {
        sim.step_period();
        if (!std::isfinite(sim.energy())) {
            std::ostringstream os;
            os << "FDTD instability detected at timestep " << sim.step_index();
            throw NumericalError(os.str());
        }
    }

    PhasorField prev, cur;
    bool have_prev = false;
    std::vector<double> history;
    double metric = 1.0;
    bool converged = false;
    while (periods < cfg.max_periods) {
        sim.begin_phasor_period();
        sim.step_period();
        ++periods;
        sim.end_phasor_period(cur);
        if (!all_finite(cur)) {
            std::ostringstream os;
            os << "FDTD instability detected at timestep " << sim.step_index();
            throw NumericalError(os.str());
        }
        if (have_prev) {
            metric = relative_change(cur, prev);
            history.push_back(metric);
            if (metric < cfg.tolerance) {
                converged = true;
                break;
            }
        }
        std::swap(prev, cur);
        have_prev = true;
    }
    // the most recent period was swapped into prev
    if (!converged) cur = std::move(prev);
    cur.converged = converged;
    cur.metric = metric;
    cur.periods = periods;
    cur.metric_history = std::move(history);
    return cur;
}

// ---------------------------------------------------------------------------
// PhasorField

double PhasorField::wavenumber_per_mm() const {
    return 2.0 * kPi * frequency_ghz * 1e9 / kSpeedOfLightMmPerS;
}

std::complex<double> PhasorField::u_at(Point2 p) const {
    const auto iy = grid.y.nearest(p.y);
    const auto iz = grid.z.nearest(p.z);
    if (!iy || !iz) throw DomainError("probe outside the phasor grid");
    return u[grid.index(*iy, *iz)];
}

std::vector<std::filesystem::path> PhasorField::write_csv(const std::filesystem::path& dir) const {
    io::ensure_directory(dir);
    const bool te = polarization == Polarization::te;
    const double h = spacing();
    const auto first = static_cast<std::size_t>(cpml_cells);
    const std::size_t ylast = grid.y.count - 1 - first, zlast = grid.z.count - 1 - first;

    struct Component {
        const char* name;
        const std::vector<std::complex<double>>* data;
        double sign, dy, dz;
    };
    const Component comps[] = {
        {te ? "Ex" : "Hx", &u, 1.0, 0.0, 0.0},
        {te ? "Hy" : "Ey", &py, te ? 1.0 : -1.0, 0.0, 0.5 * h},
        {te ? "Hz" : "Ez", &pz, te ? 1.0 : -1.0, 0.5 * h, 0.0},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& c : comps) {
        std::string out = "y_mm,z_mm,re,im\n";
        for (std::size_t iy = first; iy <= ylast; ++iy) {
            if (c.dy > 0.0 && iy == ylast) continue;
            for (std::size_t iz = first; iz <= zlast; ++iz) {
                if (c.dz > 0.0 && iz == zlast) continue;
                const auto v = c.sign * (*c.data)[grid.index(iy, iz)];
                out += io::g9(grid.y.coordinate(iy) + c.dy) + ',' + io::g9(grid.z.coordinate(iz) + c.dz) + ',' +
                       io::g9(v.real()) + ',' + io::g9(v.imag()) + '\n';
            }
        }
        const auto path = dir / (std::string("phasor_") + c.name + ".csv");
        io::write_file(path, out);
        written.push_back(path);
    }
    return written;
}

namespace {

constexpr char kMagic[6] = {'F', 'L', 'P', 'H', 'S', 'R'};
constexpr std::uint8_t kBinaryVersion = 1;

template <typename T>
void put_le(std::string& out, T v) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw IoError("phasor dump truncated");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    pos += sizeof(T);
    return std::bit_cast<T>(bytes);
}

} // namespace

void PhasorField::write_binary(const std::filesystem::path& path) const {
    std::string out;
    out.reserve(32 + 3 * grid.size() * 16);
    out.append(kMagic, sizeof kMagic);
    put_le<std::uint8_t>(out, kBinaryVersion);
    put_le<std::uint8_t>(out, polarization == Polarization::te ? 0 : 1);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.y.count));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.z.count));
    put_le<double>(out, spacing());
    put_le<std::int32_t>(out, static_cast<std::int32_t>(grid.y.first));
    put_le<std::int32_t>(out, static_cast<std::int32_t>(grid.z.first));
    for (const auto* v : {&u, &py, &pz}) {
        for (const auto& c : *v) {
            put_le<double>(out, c.real());
            put_le<double>(out, c.imag());
        }
    }
    io::write_file(path, out);
}

PhasorField PhasorField::read_binary(const std::filesystem::path& path, double frequency_ghz) {
    const std::string in = io::read_file(path);
    if (in.size() < 32 || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0) {
        throw IoError("not a phasor dump: " + path.string());
    }
    std::size_t pos = sizeof kMagic;
    if (get_le<std::uint8_t>(in, pos) != kBinaryVersion) throw IoError("unsupported phasor dump version");
    PhasorField f;
    f.polarization = get_le<std::uint8_t>(in, pos) == 0 ? Polarization::te : Polarization::tm;
    f.grid.y.count = get_le<std::uint32_t>(in, pos);
    f.grid.z.count = get_le<std::uint32_t>(in, pos);
    const double h = get_le<double>(in, pos);
    f.grid.y.step = f.grid.z.step = h;
    f.grid.y.first = get_le<std::int32_t>(in, pos);
    f.grid.z.first = get_le<std::int32_t>(in, pos);
    f.frequency_ghz = frequency_ghz;
    const std::size_t n = f.grid.size();
    if (in.size() != 32 + 3 * n * 16) throw IoError("phasor dump size does not match its header");
    for (auto* v : {&f.u, &f.py, &f.pz}) {
        v->resize(n);
        for (auto& c : *v) {
            const double re = get_le<double>(in, pos);
            const double im = get_le<double>(in, pos);
            c = {re, im};
        }
    }
    f.interior = {f.grid.y.min(), f.grid.y.max(), f.grid.z.min(), f.grid.z.max()};
    f.object_box = f.interior;
    f.converged = true;
    return f;
}

} // namespace flatlens
