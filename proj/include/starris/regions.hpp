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

#ifndef STARRIS_REGIONS_HPP
#define STARRIS_REGIONS_HPP

#include "core_em.hpp"

#include <cstddef>
#include <string_view>

namespace starris
{
    enum class FieldRegion
    {
        Reactive,
        RadiatingNearField,
        FarField
    };

    inline std::string_view to_string(FieldRegion r)
    {
        switch (r)
        {
        case FieldRegion::Reactive:
            return "reactive";
        case FieldRegion::RadiatingNearField:
            return "radiating-near-field";
        default:
            return "far-field";
        }
    }

    struct FieldRegionReport
    {
        double boundary_rb_m = 0.0;
        double reactive_rr_m = 0.0;
        FieldRegion region = FieldRegion::FarField;
        double delta_vt_max_m3 = 0.0;
        std::size_t dof = 1;
    };

    // Radiating near-field / far-field boundary r_b
    inline double field_boundary(const SignalParams &params, const BoxVolume &tx, const BoxVolume &rx)
    {
        const double lam = params.wavelength_m;
        return std::sqrt(2.0 * tx.face_area() / lam) * std::sqrt(2.0 * rx.face_area() / lam);
    }

    // Largest source volume that still appears as far field at the given distance
    inline double max_farfield_volume(const SignalParams &params, const BoxVolume &rx, double distance_m, double tx_width_z)
    {
        if (!(distance_m > 0.0))
            throw InvalidParameter("distance must be positive");
        if (!(tx_width_z > 0.0))
            throw InvalidParameter("source width must be positive");
        const double lr = params.wavelength_m * distance_m;
        return (lr / (2.0 * rx.extent_x)) * (lr / (2.0 * rx.extent_y)) * 2.0 * tx_width_z;
    }

    // Number of parallel sub-channels before rounding, 2 V_T V_R / ((lambda r)^2 dz_T dz_R)
    inline double dof_ratio(const SignalParams &params, const BoxVolume &tx, const BoxVolume &rx, double distance_m)
    {
        if (!(distance_m > 0.0))
            throw InvalidParameter("distance must be positive");
        const double lr = params.wavelength_m * distance_m;
        return 2.0 * tx.volume() * rx.volume() / (lr * lr * tx.extent_z * rx.extent_z);
    }

    inline std::size_t analytic_dof(const SignalParams &params, const BoxVolume &tx, const BoxVolume &rx, double distance_m)
    {
        if (tx.volume() <= max_farfield_volume(params, rx, distance_m, tx.extent_z))
            return 1;
        const double ratio = dof_ratio(params, tx, rx, distance_m);
        return std::max<std::size_t>(1, std::size_t(std::ceil(ratio * (1.0 - 1e-12))));
    }

    // Reactive near-field radius 0.62 sqrt(L^3 / lambda) with L the largest box extent
    inline double reactive_boundary(const SignalParams &params, const BoxVolume &tx)
    {
        const double l = tx.max_extent();
        return 0.62 * std::sqrt(l * l * l / params.wavelength_m);
    }

    inline FieldRegionReport classify(const SignalParams &params, const BoxVolume &tx, const BoxVolume &rx, double distance_m)
    {
        if (!(distance_m > 0.0))
            throw InvalidParameter("distance must be positive");
        FieldRegionReport rep;
        rep.boundary_rb_m = field_boundary(params, tx, rx);
        rep.reactive_rr_m = reactive_boundary(params, tx);
        if (rep.reactive_rr_m >= rep.boundary_rb_m)
            throw DegenerateRegion("reactive boundary lies beyond the far-field boundary");
        rep.delta_vt_max_m3 = max_farfield_volume(params, rx, distance_m, tx.extent_z);
        rep.dof = analytic_dof(params, tx, rx, distance_m);
        if (distance_m <= rep.reactive_rr_m)
            rep.region = FieldRegion::Reactive;
        else if (distance_m <= rep.boundary_rb_m)
            rep.region = FieldRegion::RadiatingNearField;
        else
            rep.region = FieldRegion::FarField;
        return rep;
    }

} // namespace starris

#endif
