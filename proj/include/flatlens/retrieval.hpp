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

#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Slab scattering parameters and effective-parameter inversion.
//
// Time convention: e^{+jwt}; a wave travelling in +x carries e^{-jkx}. A
// passive medium therefore has Im(n) <= 0, Im(eps) <= 0, Im(mu) <= 0 and
// Re(z) >= 0. Reference planes sit on the two slab faces, so a vacuum slab has
// S21 = e^{-j k0 t}.
namespace flatlens {

using cplx = std::complex<double>;

struct SlabResponse {
    double frequency_ghz = 0.0;
    cplx s11{0.0, 0.0};
    cplx s21{1.0, 0.0};
    double thickness_mm = 0.0;
};

struct EffectiveParams {
    cplx n{1.0, 0.0};
    cplx z{1.0, 0.0};
    cplx eps{1.0, 0.0};
    cplx mu{1.0, 0.0};
    int branch = 0;
    bool low_confidence = false;  // impedance ill-conditioned (Fabry-Perot point)
};

struct SlabLayer {
    cplx eps{1.0, 0.0};
    cplx mu{1.0, 0.0};
    double thickness_mm = 0.0;
};

double free_space_wavenumber(double frequency_ghz);  // rad/mm

// Homogeneous slab between vacuum half-spaces, normal incidence.
SlabResponse slab_sparams(cplx eps, cplx mu, double thickness_mm, double frequency_ghz);

// Cascade of homogeneous layers via ABCD matrices. S11 is seen from the first
// layer; thickness_mm of the response is the total.
SlabResponse stack_sparams(std::span<const SlabLayer> layers, double frequency_ghz);

// Branch selection: a fixed integer, or automatic (thin slab, m = 0).
struct BranchHint {
    std::optional<int> m;
    static BranchHint automatic() { return {}; }
    static BranchHint fixed(int m) { return {m}; }
};

// Throws NumericalError on an opaque slab and BranchAmbiguityError when the
// automatic choice is not physical.
EffectiveParams retrieve_params(const SlabResponse& response, BranchHint hint = BranchHint::automatic());

class BranchAmbiguityError : public std::runtime_error {
public:
    BranchAmbiguityError(const std::string& what, std::vector<int> candidates)
        : std::runtime_error(what), candidates_(std::move(candidates)) {}
    const std::vector<int>& candidates() const { return candidates_; }

private:
    std::vector<int> candidates_;
};

// Frequency-ordered sweep: the branch of the first point comes from `hint`,
// later points follow phase continuity. A phase advance >= pi between
// neighbours raises NumericalError (undersampled sweep).
std::vector<EffectiveParams> retrieve_sweep(std::span<const SlabResponse> responses,
                                            BranchHint hint = BranchHint::automatic());

// `f_ghz,s11_re,s11_im,s21_re,s21_im,t_mm`
std::vector<SlabResponse> read_sweep_csv(const std::filesystem::path& path);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SlabResponse> responses);
// `f_ghz,n_re,n_im,z_re,z_im,eps_re,eps_im,mu_re,mu_im,m`
void write_params_csv(const std::filesystem::path& path, std::span<const SlabResponse> responses,
                      std::span<const EffectiveParams> params);

} // namespace flatlens
