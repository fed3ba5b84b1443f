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

// flatlens: config-driven pipeline for the flattened Luneburg lens.
//
//   flatlens --config lens.ini material
//   flatlens --config lens.ini --out runs/a scan
//   flatlens retrieve --input sweep.csv --branch 1
//
// Exit codes: 0 ok, 2 invalid configuration or input, 3 numerical failure,
// 4 file I/O failure.

#include "flatlens/errors.hpp"
#include "flatlens/pipeline.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flattened Luneburg lens design pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    long seed = 0;
    app.add_option("--config", config_path, "Pipeline configuration file (defaults apply when omitted)");
    app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    app.add_option("--threads", threads, "Worker threads for the field solver (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "Reserved; the pipeline is deterministic");

    auto* material = app.add_subcommand("material", "Sample the transformed material maps");
    auto* discretize = app.add_subcommand("discretize", "Build and export the unit-cell layer stack");
    auto* simulate = app.add_subcommand("simulate", "Run the centred-feed CW simulation");
    auto* scan = app.add_subcommand("scan", "Feed-offset sweep with far-field metrics");
    auto* ab = app.add_subcommand("ab-weighting", "Scan with and without the cosine weighting");
    auto* retrieve = app.add_subcommand("retrieve", "Effective parameters from slab S-parameters");

    std::string material_source;
    simulate->add_option("--material", material_source, "continuous or discretized (overrides [sim] material)")
        ->check(CLI::IsMember({"continuous", "discretized"}));
    scan->add_option("--material", material_source, "continuous or discretized (overrides [sim] material)")
        ->check(CLI::IsMember({"continuous", "discretized"}));

    std::string input;
    int branch = 0;
    retrieve->add_option("--input", input, "CSV f_ghz,s11_re,s11_im,s21_re,s21_im,t_mm")->required();
    auto* branch_opt = retrieve->add_option("--branch", branch, "Phase branch of the first frequency (default: thin slab)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        flatlens::PipelineConfig config;
        if (!config_path.empty()) config = flatlens::PipelineConfig::load(config_path);
        if (!material_source.empty()) {
            config.material = material_source == "discretized" ? flatlens::MaterialSource::discretized
                                                               : flatlens::MaterialSource::continuous;
        }
        const std::filesystem::path dir = out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir);

        std::vector<std::string> files;
        if (*material) files = flatlens::cmd_material(config, dir);
        else if (*discretize) files = flatlens::cmd_discretize(config, dir);
        else if (*simulate) files = flatlens::cmd_simulate(config, dir);
        else if (*scan) files = flatlens::cmd_scan(config, dir);
        else if (*ab) files = flatlens::cmd_ab_weighting(config, dir);
        else if (*retrieve) {
            const auto hint = *branch_opt ? flatlens::BranchHint::fixed(branch) : flatlens::BranchHint::automatic();
            files = flatlens::cmd_retrieve(input, hint, dir);
        }
        for (const auto& f : files) std::cout << (dir / f).string() << "\n";
        return 0;
    } catch (const flatlens::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const flatlens::BranchAmbiguityError& e) {
        std::cerr << "error: " << e.what() << " (candidates:";
        for (int m : e.candidates()) std::cerr << ' ' << m;
        std::cerr << ")\n";
        return kExitConfig;
    } catch (const flatlens::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const flatlens::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const flatlens::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
