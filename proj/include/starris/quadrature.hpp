// SPDX-License-Identifier: Apache-2.0
//
// starris: Green's-function channel model for metasurface RIS and STAR-RIS
// Copyright (C) 2026 The starris authors
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

#ifndef STARRIS_QUADRATURE_HPP
#define STARRIS_QUADRATURE_HPP

#include "core_em.hpp"

#include <cstddef>
#include <vector>

namespace starris
{
    inline constexpr double default_samples_per_wavelength = 4.0;

    // Midpoint-rule samples of a box volume
    struct QuadratureGrid
    {
        std::vector<Point3> points;
        std::vector<double> weights; // [m^3]
        BoxVolume source_volume;
        std::size_t nx = 0, ny = 0, nz = 0;

        std::size_t size() const { return points.size(); }

        double total_weight() const
        {
            double s = 0.0;
            for (double w : weights)
                s += w;
            return s;
        }

        // Uniform midpoint grid with explicit per-axis counts
        static QuadratureGrid uniform(const BoxVolume &box, std::size_t nx, std::size_t ny, std::size_t nz)
        {
            if (nx == 0 || ny == 0 || nz == 0)
                throw InvalidParameter("quadrature counts must be positive");
            QuadratureGrid g;
            g.source_volume = box;
            g.nx = nx, g.ny = ny, g.nz = nz;
            const Point3 lo = box.lower();
            const double hx = box.extent_x / double(nx), hy = box.extent_y / double(ny), hz = box.extent_z / double(nz);
            const double w = box.volume() / double(nx * ny * nz);
            g.points.reserve(nx * ny * nz);
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j)
                    for (std::size_t l = 0; l < nz; ++l)
                        g.points.push_back({lo.x + (double(i) + 0.5) * hx,
                                            lo.y + (double(j) + 0.5) * hy,
                                            lo.z + (double(l) + 0.5) * hz});
            g.weights.assign(g.points.size(), w);
            return g;
        }

        // Grid with at least the given number of samples per wavelength on every axis
        static QuadratureGrid with_density(const BoxVolume &box, const SignalParams &params,
                                           double samples_per_wavelength = default_samples_per_wavelength)
        {
            if (!(samples_per_wavelength > 0.0))
                throw InvalidParameter("sample density must be positive");
            auto count = [&](double extent)
            {
                const double n = std::ceil(extent * samples_per_wavelength / params.wavelength_m - 1e-9);
                return std::size_t(std::max(1.0, n));
            };
            return uniform(box, count(box.extent_x), count(box.extent_y), count(box.extent_z));
        }

        // Single sample at the box center carrying the full volume
        static QuadratureGrid point(const BoxVolume &box) { return uniform(box, 1, 1, 1); }
    };

} // namespace starris

#endif
