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

#ifndef STARRIS_GAIN_SINGLE_HPP
#define STARRIS_GAIN_SINGLE_HPP

#include "core_em.hpp"
#include "regions.hpp"

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

namespace starris
{
    // Illumination of the surface by the base station
    struct LinkBudget
    {
        double bs_directivity = 1.0; // Linear
        double bs_distance_m = 1.0;
        double tx_aperture_m2 = 1.0;

        void validate() const
        {
            if (!(bs_directivity >= 0.0) || !(bs_distance_m > 0.0) || !(tx_aperture_m2 > 0.0))
                throw InvalidParameter("link budget entries must be positive");
        }

        // D A_T / (4 pi d^2)
        double friis_factor() const
        {
            validate();
            return bs_directivity * tx_aperture_m2 / (4.0 * pi * bs_distance_m * bs_distance_m);
        }

        // A factor above one means the surface collects more than the radiated power
        bool unphysical() const { return friis_factor() > 1.0; }
    };

    // --------------------------------------------------------------------------------------------
    // Two-surface element model

    inline double wrap_phase(double phi)
    {
        double w = std::remainder(phi, 2.0 * pi); // [-pi, pi]
        return w <= -pi ? w + 2.0 * pi : w;
    }

    struct ElementCurrents
    {
        double j1_amp = 0.0, j1_phase = 0.0; // Incident-side surface current
        double j2_amp = 0.0, j2_phase = 0.0; // Transmission-side surface current

        static ElementCurrents make(double a1, double p1, double a2, double p2)
        {
            if (!(a1 >= 0.0) || !(a2 >= 0.0))
                throw InvalidParameter("current amplitudes must be non-negative");
            return {a1, wrap_phase(p1), a2, wrap_phase(p2)};
        }

        cplx j1() const { return std::polar(j1_amp, j1_phase); }
        cplx j2() const { return std::polar(j2_amp, j2_phase); }
    };

    enum class RisType
    {
        TransmitOnly,
        ReflectOnly,
        Star
    };

    // Equal-amplitude current pairs realizing the three surface types
    inline ElementCurrents currents_for(RisType type, double amplitude = 1.0)
    {
        switch (type)
        {
        case RisType::TransmitOnly:
            return ElementCurrents::make(amplitude, 0.0, amplitude, pi / 2.0);
        case RisType::ReflectOnly:
            return ElementCurrents::make(amplitude, pi / 2.0, amplitude, 0.0);
        default:
            return ElementCurrents::make(amplitude, 0.0, amplitude, pi);
        }
    }

    // Transmission and reflection factors of a quarter-wave element (common factor removed)
    inline std::pair<cplx, cplx> tr_from_currents(const ElementCurrents &c)
    {
        const cplx q(0.0, 1.0); // exp(j pi/2)
        return {c.j1() * q + c.j2(), c.j1() + c.j2() * q};
    }

    // |T| and |R| relative to the transmit-only magnitude |J1| + |J2|
    inline std::pair<double, double> normalized_tr(const ElementCurrents &c)
    {
        const double ref = c.j1_amp + c.j2_amp;
        if (!(ref > 0.0))
            throw InvalidParameter("element carries no current");
        const auto [t, r] = tr_from_currents(c);
        return {std::abs(t) / ref, std::abs(r) / ref};
    }

    // --------------------------------------------------------------------------------------------
    // Tiling into far-field sub-volumes

    struct Tile
    {
        BoxVolume box;
        double distance_m = 0.0; // Tile center to receiver
    };

    struct TilePartition
    {
        std::vector<Tile> tiles;
        BoxVolume parent;
        std::size_t nx = 1, ny = 1;

        std::size_t size() const { return tiles.size(); }

        // Index of the tile holding a point of the parent face (half-open cells)
        std::size_t tile_index(const Point3 &p) const
        {
            const Point3 lo = parent.lower();
            auto cell = [](double u, double len, std::size_t n)
            {
                const double f = std::floor(u / len * double(n));
                return std::size_t(std::clamp(f, 0.0, double(n - 1)));
            };
            return cell(p.x - lo.x, parent.extent_x, nx) * ny + cell(p.y - lo.y, parent.extent_y, ny);
        }
    };

    struct TilingOptions
    {
        bool single_distance = false; // Use the parent-center distance for every tile
        std::size_t max_tiles = 250000;
    };

    inline TilePartition make_grid_partition(const BoxVolume &tx, std::size_t nx, std::size_t ny, const Point3 &rx_center)
    {
        TilePartition part;
        part.parent = tx;
        part.nx = nx, part.ny = ny;
        const Point3 lo = tx.lower();
        const double tw = tx.extent_x / double(nx), th = tx.extent_y / double(ny);
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j)
            {
                const Point3 c{lo.x + (double(i) + 0.5) * tw, lo.y + (double(j) + 0.5) * th, tx.center.z};
                part.tiles.push_back({BoxVolume(c, tw, th, tx.extent_z), distance(c, rx_center)});
            }
        return part;
    }

    namespace detail
    {
        inline double closest_distance(const BoxVolume &b, const Point3 &p)
        {
            const Point3 lo = b.lower(), hi = b.upper();
            const Point3 q{std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y), std::clamp(p.z, lo.z, hi.z)};
            return distance(p, q);
        }
    } // namespace detail

    // Coarsest grid tiling whose tiles each fit the far-field volume at their closest distance. Lateral tile
    // extents are also capped at twice the per-axis far-field width lambda r / (2 dx_R), which keeps tiles compact.
    inline TilePartition partition_tiles(const SignalParams &params, const BoxVolume &tx, const BoxVolume &rx,
                                         const Point3 &rx_center, const TilingOptions &opt = {})
    {
        if (tx.contains(rx_center))
            throw SingularPoint("receiver center lies inside the surface volume");
        const double r0 = distance(tx.center, rx_center);
        auto limit = [&](double r)
        { return max_farfield_volume(params, rx, r, tx.extent_z) * (1.0 + 1e-12); };

        double r_far = 0.0;
        for (double sx : {-0.5, 0.5})
            for (double sy : {-0.5, 0.5})
                r_far = std::max(r_far, distance(tx.center + Point3{sx * tx.extent_x, sy * tx.extent_y, 0.0}, rx_center));
        if (opt.single_distance)
            r_far = r0;
        const double n_lo = std::max(1.0, std::ceil(tx.volume() / limit(r_far) - 1e-9));
        if (n_lo > double(opt.max_tiles))
            throw InvalidParameter("tiling exceeds the tile limit");

        for (std::size_t n = std::size_t(n_lo); n <= opt.max_tiles; ++n)
        {
            std::vector<std::pair<std::size_t, std::size_t>> shapes;
            for (std::size_t a = 1; a * a <= n; ++a)
                if (n % a == 0)
                {
                    shapes.emplace_back(a, n / a);
                    if (a != n / a)
                        shapes.emplace_back(n / a, a);
                }
            auto aspect = [&](const std::pair<std::size_t, std::size_t> &s)
            { return std::abs(std::log((tx.extent_x / double(s.first)) / (tx.extent_y / double(s.second)))); };
            std::stable_sort(shapes.begin(), shapes.end(), [&](const auto &a, const auto &b)
                             { return aspect(a) < aspect(b); });
            for (const auto &[nx, ny] : shapes)
            {
                TilePartition part = make_grid_partition(tx, nx, ny, rx_center);
                const double v = part.tiles.front().box.volume();
                const bool fits = std::all_of(part.tiles.begin(), part.tiles.end(), [&](const Tile &t)
                                              {
                                                  const double r = opt.single_distance ? r0 : detail::closest_distance(t.box, rx_center);
                                                  const double wx = params.wavelength_m * r / rx.extent_x * (1.0 + 1e-12);
                                                  const double wy = params.wavelength_m * r / rx.extent_y * (1.0 + 1e-12);
                                                  return v <= limit(r) && t.box.extent_x <= wx && t.box.extent_y <= wy; });
                if (fits)
                    return part;
            }
        }
        throw InvalidParameter("tiling exceeds the tile limit");
    }

    // Maximum end-to-end gain with focused currents in every tile
    inline double channel_gain_upper_bound(const SignalParams &params, const LinkBudget &budget,
                                           const TilePartition &partition, const BoxVolume &rx)
    {
        double sum = 0.0;
        for (const Tile &t : partition.tiles)
        {
            const double s = 4.0 * pi * t.distance_m;
            sum += rx.volume() * t.box.volume() / (s * s);
        }
        return budget.friis_factor() * params.beta_sq() * sum;
    }

    // --------------------------------------------------------------------------------------------
    // Power scaling with unnormalized per-element currents

    struct TileOccupancy
    {
        std::size_t count = 0;   // Elements inside the tile
        double distance_m = 0.0; // Tile center to receiver
    };

    inline std::vector<TileOccupancy> tile_occupancy(const TilePartition &partition, std::span<const Point3> element_centers)
    {
        std::vector<TileOccupancy> occ(partition.size());
        for (std::size_t i = 0; i < occ.size(); ++i)
            occ[i].distance_m = partition.tiles[i].distance_m;
        for (const Point3 &c : element_centers)
            ++occ[partition.tile_index(c)].count;
        return occ;
    }

    inline double power_scaling(const SignalParams &params, const LinkBudget &budget, double rx_volume_m3,
                                double element_volume, std::span<const TileOccupancy> layout)
    {
        if (!(element_volume > 0.0) || !(rx_volume_m3 > 0.0))
            throw InvalidParameter("volumes must be positive");
        std::size_t total = 0;
        double sum = 0.0;
        for (const TileOccupancy &t : layout)
        {
            total += t.count;
            if (t.count == 0)
                continue;
            if (!(t.distance_m > 0.0))
                throw InvalidParameter("tile distance must be positive");
            const double s = 4.0 * pi * t.distance_m;
            const double m = double(t.count);
            sum += element_volume * element_volume * m * m / (s * s);
        }
        if (total == 0)
            throw InvalidParameter("layout holds no elements");
        return params.beta_sq() * rx_volume_m3 * budget.friis_factor() * sum;
    }

    // One point of a power-scaling sweep over a row of M square elements along x
    struct ScalingPoint
    {
        std::size_t elements = 0;
        std::size_t tiles = 0;
        double power = 0.0;
        double ris_volume_m3 = 0.0;
        double max_farfield_volume_m3 = 0.0; // At the surface-center distance
    };

    inline ScalingPoint row_scaling_point(const SignalParams &params, const LinkBudget &budget, double element_side_m,
                                          double element_thickness_m, std::size_t elements, const BoxVolume &rx,
                                          const TilingOptions &opt = {})
    {
        if (elements == 0)
            throw InvalidParameter("at least one element is required");
        const double w = element_side_m * double(elements);
        const BoxVolume ris({0.0, 0.0, 0.0}, w, element_side_m, element_thickness_m);
        const TilePartition part = partition_tiles(params, ris, rx, rx.center, opt);
        std::vector<Point3> centers;
        for (std::size_t m = 0; m < elements; ++m)
            centers.push_back({-w / 2.0 + (double(m) + 0.5) * element_side_m, 0.0, 0.0});
        const auto occ = tile_occupancy(part, centers);
        ScalingPoint pt;
        pt.elements = elements;
        pt.tiles = part.size();
        pt.power = power_scaling(params, budget, rx.volume(), ris.volume() / double(elements), occ);
        pt.ris_volume_m3 = ris.volume();
        pt.max_farfield_volume_m3 = max_farfield_volume(params, rx, distance(ris.center, rx.center), element_thickness_m);
        return pt;
    }

    // Least-squares slope of log(y) against log(x)
    inline double loglog_slope(std::span<const double> x, std::span<const double> y)
    {
        if (x.size() != y.size() || x.size() < 2)
            throw InvalidParameter("slope fit needs two or more matching samples");
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = double(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            if (!(x[i] > 0.0) || !(y[i] > 0.0))
                throw InvalidParameter("slope fit needs positive samples");
            const double lx = std::log(x[i]), ly = std::log(y[i]);
            sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        }
        const double den = n * sxx - sx * sx;
        if (!(std::abs(den) > 0.0))
            throw InvalidParameter("slope fit needs distinct abscissae");
        return (n * sxy - sx * sy) / den;
    }

} // namespace starris

#endif
