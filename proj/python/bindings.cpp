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
#include "flatlens/farfield.hpp"
#include "flatlens/lens.hpp"
#include "flatlens/material_map.hpp"
#include "flatlens/pipeline.hpp"
#include "flatlens/retrieval.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace flatlens;

namespace {

// (y, z, eps) arrays of a reduced map; eps has shape (ny, nz).
py::tuple map_arrays(const MaterialMap& m) {
    const auto& g = m.grid();
    py::array_t<double> y(static_cast<py::ssize_t>(g.y.count)), z(static_cast<py::ssize_t>(g.z.count));
    py::array_t<double> eps({static_cast<py::ssize_t>(g.y.count), static_cast<py::ssize_t>(g.z.count)});
    auto yv = y.mutable_unchecked<1>();
    auto zv = z.mutable_unchecked<1>();
    auto ev = eps.mutable_unchecked<2>();
    for (std::size_t i = 0; i < g.y.count; ++i) yv(static_cast<py::ssize_t>(i)) = g.y.coordinate(i);
    for (std::size_t j = 0; j < g.z.count; ++j) zv(static_cast<py::ssize_t>(j)) = g.z.coordinate(j);
    for (std::size_t i = 0; i < g.y.count; ++i) {
        for (std::size_t j = 0; j < g.z.count; ++j) ev(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m.eps(i, j);
    }
    return py::make_tuple(y, z, eps);
}

py::dict metrics_dict(const PatternMetrics& m) {
    py::dict d;
    d["peak_deg"] = m.peak_deg;
    d["hpbw_deg"] = m.hpbw_deg;
    d["sll_db"] = m.sll_db;
    d["f2b_db"] = m.f2b_db;
    d["dir2d_db"] = m.dir2d_db;
    d["scan_loss_db"] = m.scan_loss_db ? py::cast(*m.scan_loss_db) : py::none();
    return d;
}

} // namespace

PYBIND11_MODULE(_flatlens, m) {
    m.doc() = "Flattened Luneburg lens design: material maps, 2D FDTD, far field, retrieval";

    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<BranchAmbiguityError>(m, "BranchAmbiguityError", config_error.ptr());

    py::class_<LensSpec>(m, "LensSpec")
        .def(py::init([](double radius_mm, double half_thickness_mm, double weight_amplitude, double weight_period_mm,
                         double eps_min_clamp) {
                 LensSpec s{radius_mm, half_thickness_mm, weight_amplitude, weight_period_mm, eps_min_clamp};
                 s.validate();
                 return s;
             }),
             py::arg("radius_mm") = 32.0, py::arg("half_thickness_mm") = 4.0, py::arg("weight_amplitude") = 1.0,
             py::arg("weight_period_mm") = 10.0, py::arg("eps_min_clamp") = 1.0)
        .def_readonly("radius_mm", &LensSpec::radius_mm)
        .def_readonly("half_thickness_mm", &LensSpec::half_thickness_mm)
        .def_readonly("weight_amplitude", &LensSpec::weight_amplitude)
        .def_readonly("weight_period_mm", &LensSpec::weight_period_mm)
        .def_readonly("eps_min_clamp", &LensSpec::eps_min_clamp);

    m.def("luneburg_eps", &luneburg_eps, py::arg("r_mm"), py::arg("radius_mm"));
    m.def("forward_map", [](double y, double z, const LensSpec& s) {
        const Point2 p = forward_map({y, z}, s);
        return py::make_tuple(p.y, p.z);
    }, py::arg("y_mm"), py::arg("z_mm"), py::arg("spec") = LensSpec{});
    m.def("inverse_map", [](double y, double z, const LensSpec& s) {
        const Point2 p = inverse_map({y, z}, s);
        return py::make_tuple(p.y, p.z);
    }, py::arg("y_mm"), py::arg("z_mm"), py::arg("spec") = LensSpec{});
    m.def("compute_tensors", [](double y, double z, const LensSpec& s) {
        const auto t = compute_tensors(y, z, s);
        return py::make_tuple(py::make_tuple(t.eps_xx, t.eps_yy, t.eps_zz), py::make_tuple(t.mu_xx, t.mu_yy, t.mu_zz));
    }, py::arg("y_mm"), py::arg("z_mm"), py::arg("spec") = LensSpec{},
          "Returns ((eps_xx, eps_yy, eps_zz), (mu_xx, mu_yy, mu_zz)).");
    m.def("center_permittivity", &center_permittivity, py::arg("spec") = LensSpec{});
    m.def("material_map", [](const LensSpec& s, double step_mm, bool weighted, bool preimage) {
        const SampleOptions opt{true, weighted, preimage ? EpsArgument::preimage : EpsArgument::literal};
        return map_arrays(sample_material(s, lens_grid(s, step_mm), opt));
    }, py::arg("spec") = LensSpec{}, py::arg("step_mm") = 0.25, py::arg("weighted") = true, py::arg("preimage") = false,
          "Reduced permittivity on the lens grid as (y, z, eps[ny, nz]).");

    m.def("slab_sparams", [](std::complex<double> eps, std::complex<double> mu, double t, double f) {
        const auto r = slab_sparams(eps, mu, t, f);
        return py::make_tuple(r.s11, r.s21);
    }, py::arg("eps"), py::arg("mu"), py::arg("thickness_mm"), py::arg("f_ghz"));
    m.def("retrieve", [](const std::vector<double>& f, const std::vector<std::complex<double>>& s11,
                         const std::vector<std::complex<double>>& s21, double t, std::optional<int> branch) {
        if (f.size() != s11.size() || f.size() != s21.size()) throw ConfigError("retrieve: length mismatch");
        std::vector<SlabResponse> rs;
        for (std::size_t i = 0; i < f.size(); ++i) rs.push_back({f[i], s11[i], s21[i], t});
        const auto ps = retrieve_sweep(rs, branch ? BranchHint::fixed(*branch) : BranchHint::automatic());
        py::dict out;
        std::vector<std::complex<double>> n, z, eps, mu;
        std::vector<bool> low;
        for (const auto& p : ps) {
            n.push_back(p.n);
            z.push_back(p.z);
            eps.push_back(p.eps);
            mu.push_back(p.mu);
            low.push_back(p.low_confidence);
        }
        out["n"] = n;
        out["z"] = z;
        out["eps"] = eps;
        out["mu"] = mu;
        out["low_confidence"] = low;
        return out;
    }, py::arg("f_ghz"), py::arg("s11"), py::arg("s21"), py::arg("thickness_mm"), py::arg("branch") = py::none(),
          "Effective parameters over an ordered frequency sweep.");

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_static("parse", [](const std::string& text, const std::optional<std::filesystem::path>& base_dir) {
            return PipelineConfig::parse(text, base_dir.value_or(std::filesystem::path{}));
        }, py::arg("text"), py::arg("base_dir") = py::none())
        .def_static("load", &PipelineConfig::load, py::arg("path"))
        .def("validate", &PipelineConfig::validate)
        .def("to_ini", &PipelineConfig::to_ini)
        .def_readwrite("weighting", &PipelineConfig::weighting)
        .def_readwrite("feed_offsets_mm", &PipelineConfig::feed_offsets_mm)
        .def_readwrite("focal_mm", &PipelineConfig::focal_mm)
        .def_readwrite("output_dir", &PipelineConfig::output_dir);

    m.def("cmd_material", &cmd_material, py::arg("config"), py::arg("dir"), py::call_guard<py::gil_scoped_release>());
    m.def("cmd_discretize", &cmd_discretize, py::arg("config"), py::arg("dir"), py::call_guard<py::gil_scoped_release>());
    m.def("cmd_simulate", &cmd_simulate, py::arg("config"), py::arg("dir"), py::call_guard<py::gil_scoped_release>());
    m.def("cmd_scan", &cmd_scan, py::arg("config"), py::arg("dir"), py::call_guard<py::gil_scoped_release>());
    m.def("cmd_ab_weighting", &cmd_ab_weighting, py::arg("config"), py::arg("dir"),
          py::call_guard<py::gil_scoped_release>());
    m.def("scan", [](const PipelineConfig& c) {
        std::vector<ScanEntry> entries;
        {
            py::gil_scoped_release release;
            entries = run_scan(c);
        }
        py::list out;
        for (const auto& e : entries) {
            py::dict d = metrics_dict(e.metrics);
            d["offset_mm"] = e.offset_mm;
            out.append(d);
        }
        return out;
    }, py::arg("config"), "Feed sweep; one metrics dict per offset.");
}
