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

#ifndef STARRIS_CORE_EM_HPP
#define STARRIS_CORE_EM_HPP

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

namespace starris
{
    using cplx = std::complex<double>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // [m/s]
    inline constexpr double mu0 = 1.25663706212e-6;       // Vacuum permeability [H/m]
    inline constexpr double eps0 = 1.0 / (mu0 * speed_of_light * speed_of_light);

    // Cartesian point or vector in [m]
    struct Point3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Point3 operator+(const Point3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Point3 operator-(const Point3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
        constexpr Point3 operator/(double s) const { return {x / s, y / s, z / s}; }
        constexpr bool operator==(const Point3 &) const = default;

        constexpr double dot(const Point3 &o) const { return x * o.x + y * o.y + z * o.z; }
        constexpr Point3 cross(const Point3 &o) const
        {
            return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
        }
        double norm() const { return std::sqrt(dot(*this)); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double distance(const Point3 &a, const Point3 &b) { return (a - b).norm(); }

    // Carrier description shared by all propagation routines
    struct SignalParams
    {
        double frequency_hz = 0.0;
        double wavelength_m = 0.0;
        double wavenumber = 0.0;   // k = 2 pi / lambda [rad/m]
        double angular_freq = 0.0; // omega = 2 pi f [rad/s]
        cplx beta;                 // Coupling prefactor of the radiated field

        // Default prefactor -j omega mu0 unless a magnitude is given (phase stays -pi/2)
        static SignalParams from_frequency(double frequency_hz, std::optional<double> beta_magnitude = std::nullopt)
        {
            if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
                throw InvalidParameter("frequency must be positive and finite");
            SignalParams p;
            p.frequency_hz = frequency_hz;
            p.wavelength_m = speed_of_light / frequency_hz;
            p.wavenumber = 2.0 * pi / p.wavelength_m;
            p.angular_freq = 2.0 * pi * frequency_hz;
            p.set_beta_magnitude(beta_magnitude.value_or(p.angular_freq * mu0));
            return p;
        }

        static SignalParams from_wavelength(double wavelength_m, std::optional<double> beta_magnitude = std::nullopt)
        {
            if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
                throw InvalidParameter("wavelength must be positive and finite");
            SignalParams p = from_frequency(speed_of_light / wavelength_m, beta_magnitude);
            p.wavelength_m = wavelength_m;
            p.wavenumber = 2.0 * pi / wavelength_m;
            return p;
        }

        void set_beta_magnitude(double magnitude)
        {
            if (!(magnitude > 0.0) || !std::isfinite(magnitude))
                throw InvalidParameter("beta magnitude must be positive");
            beta = cplx(0.0, -magnitude);
        }

        void set_beta(cplx value)
        {
            if (!(std::abs(value) > 0.0))
                throw InvalidParameter("beta must be non-zero");
            beta = value;
        }

        double beta_sq() const { return std::norm(beta); } // |beta|^2
    };

    // Axis-aligned box given by its center and full extents
    class BoxVolume
    {
    public:
        Point3 center;
        double extent_x = 0.0, extent_y = 0.0, extent_z = 0.0;

        BoxVolume() = default;
        BoxVolume(Point3 c, double ex, double ey, double ez) : center(c), extent_x(ex), extent_y(ey), extent_z(ez)
        {
            auto ok = [](double v)
            { return v > 0.0 && std::isfinite(v); };
            if (!ok(ex) || !ok(ey) || !ok(ez))
                throw InvalidParameter("box extents must be positive and finite");
            if (!c.finite())
                throw InvalidParameter("box center must be finite");
        }

        double volume() const { return extent_x * extent_y * extent_z; }
        double face_area() const { return extent_x * extent_y; } // x-y aperture
        double max_extent() const { return std::max({extent_x, extent_y, extent_z}); }
        Point3 lower() const { return center - Point3{extent_x, extent_y, extent_z} * 0.5; }
        Point3 upper() const { return center + Point3{extent_x, extent_y, extent_z} * 0.5; }

        // Closed containment with a relative slack for boundary samples
        bool contains(const Point3 &p, double slack = 1e-12) const
        {
            const Point3 lo = lower(), hi = upper();
            const double s = slack * max_extent();
            return p.x >= lo.x - s && p.x <= hi.x + s && p.y >= lo.y - s && p.y <= hi.y + s &&
                   p.z >= lo.z - s && p.z <= hi.z + s;
        }

        // True if the interiors intersect
        bool overlaps(const BoxVolume &o) const
        {
            const Point3 a0 = lower(), a1 = upper(), b0 = o.lower(), b1 = o.upper();
            return a0.x < b1.x && b0.x < a1.x && a0.y < b1.y && b0.y < a1.y && a0.z < b1.z && b0.z < a1.z;
        }
    };

    // y-polarized scalar Green's function including the coupling prefactor
    inline cplx green_yy(const SignalParams &params, const Point3 &field_pt, const Point3 &source_pt)
    {
        const double d = distance(field_pt, source_pt);
        if (!(d > 0.0))
            throw SingularPoint("field and source points coincide");
        return -params.beta * std::polar(1.0 / (4.0 * pi * d), -params.wavenumber * d);
    }

    // Focusing phase F for a point given in the frame whose z-axis points at the receiver
    inline cplx focusing_phase(const SignalParams &params, const Point3 &local_source, double focal_distance)
    {
        if (!(focal_distance > 0.0) || !std::isfinite(focal_distance))
            throw InvalidParameter("focal distance must be positive");
        const double rho2 = local_source.x * local_source.x + local_source.y * local_source.y;
        const double path = local_source.z - rho2 / (2.0 * focal_distance);
        return std::polar(1.0, -params.wavenumber * path);
    }

    // Right-handed orthonormal frame centered at an element with z pointing at a target
    struct LocalFrame
    {
        Point3 origin, ex, ey, ez;

        LocalFrame(const Point3 &element_center, const Point3 &target) : origin(element_center)
        {
            const Point3 d = target - element_center;
            const double n = d.norm();
            if (!(n > 0.0))
                throw DegenerateFrame("element center and target coincide");
            ez = d / n;
            const Point3 gy{0.0, 1.0, 0.0};
            Point3 y = gy - ez * gy.dot(ez);
            const double ny = y.norm();
            if (ny > 1e-9)
            {
                ey = y / ny;
                ex = ey.cross(ez);
            }
            else // z parallel to global y
            {
                ex = {1.0, 0.0, 0.0};
                ey = ez.cross(ex);
            }
        }

        Point3 to_local(const Point3 &global_pt) const
        {
            const Point3 d = global_pt - origin;
            return {d.dot(ex), d.dot(ey), d.dot(ez)};
        }
    };

    inline Point3 local_frame(const Point3 &element_center, const Point3 &target, const Point3 &global_pt)
    {
        return LocalFrame(element_center, target).to_local(global_pt);
    }

    // Power ratio conversions
    inline double to_db(double linear) { return 10.0 * std::log10(linear); }
    inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace starris

#endif
