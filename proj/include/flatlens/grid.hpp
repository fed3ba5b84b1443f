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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>

namespace flatlens {

// A uniform axis whose nodes sit at integer multiples of `step`:
// coordinate(i) = (first + i) * step. Anchoring every grid to the origin keeps
// mirror-symmetric grids bit-exactly symmetric and lets grids with commensurate
// steps share nodes.
struct Axis {
    std::int64_t first = 0;
    std::size_t count = 1;
    double step = 1.0;

    double coordinate(std::size_t i) const { return static_cast<double>(first + static_cast<std::int64_t>(i)) * step; }
    double min() const { return coordinate(0); }
    double max() const { return coordinate(count - 1); }

    // Nodes covering [lo, hi] (snapped outward to multiples of step).
    static Axis covering(double lo, double hi, double step);
    // 2n+1 nodes centred on zero reaching at least `half_extent`.
    static Axis symmetric(double half_extent, double step);

    // Index of the nearest node; exact half-way ties go to the node closer to
    // zero so that lookups are mirror-symmetric. Empty when outside the axis
    // by more than half a step.
    std::optional<std::size_t> nearest(double x) const;
};

struct Grid2D {
    Axis y;
    Axis z;

    std::size_t size() const { return y.count * z.count; }
    // Row-major with z fastest.
    std::size_t index(std::size_t iy, std::size_t iz) const { return iy * z.count + iz; }
};

inline Axis Axis::covering(double lo, double hi, double step) {
    Axis a;
    a.step = step;
    a.first = static_cast<std::int64_t>(std::floor(lo / step + 1e-9));
    const auto last = static_cast<std::int64_t>(std::ceil(hi / step - 1e-9));
    a.count = static_cast<std::size_t>(last - a.first + 1);
    return a;
}

inline Axis Axis::symmetric(double half_extent, double step) {
    const auto n = static_cast<std::int64_t>(std::ceil(half_extent / step - 1e-9));
    Axis a;
    a.step = step;
    a.first = -n;
    a.count = static_cast<std::size_t>(2 * n + 1);
    return a;
}

inline std::optional<std::size_t> Axis::nearest(double x) const {
    const double u = x / step;
    const double fl = std::floor(u);
    const double frac = u - fl;
    double k;
    if (std::abs(frac - 0.5) < 1e-9) {
        // tie: pick whichever of fl, fl+1 has the smaller magnitude
        k = (std::abs(fl) <= std::abs(fl + 1.0)) ? fl : fl + 1.0;
    } else {
        k = std::round(u);
    }
    const auto idx = static_cast<std::int64_t>(k) - first;
    if (idx < 0 || idx >= static_cast<std::int64_t>(count)) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

} // namespace flatlens
