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

#include <catch_amalgamated.hpp>

#include <starris/core_em.hpp>

#include "support/oracles.hpp"

#include <random>

using namespace starris;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("SignalParams derives wavelength, wavenumber and beta")
{
    const auto p = SignalParams::from_frequency(30e9);
    CHECK_THAT(p.wavelength_m * p.frequency_hz, WithinRel(speed_of_light, 1e-12));
    CHECK(p.wavenumber == 2.0 * pi / p.wavelength_m);
    CHECK_THAT(std::abs(p.beta), WithinRel(2.0 * pi * 30e9 * mu0, 1e-12));
    CHECK_THAT(std::arg(p.beta), WithinAbs(-pi / 2.0, 1e-15));

    const auto q = SignalParams::from_wavelength(0.01, 2.5);
    CHECK(q.wavelength_m == 0.01);
    CHECK_THAT(q.beta_sq(), WithinRel(6.25, 1e-12));

    CHECK_THROWS_AS(SignalParams::from_frequency(-1.0), InvalidParameter);
    CHECK_THROWS_AS(SignalParams::from_wavelength(0.0), InvalidParameter);
    CHECK_THROWS_AS(SignalParams::from_wavelength(0.01, 0.0), InvalidParameter);
}

TEST_CASE("BoxVolume rejects degenerate extents")
{
    const BoxVolume b({1.0, 2.0, 3.0}, 0.5, 0.25, 0.1);
    CHECK_THAT(b.volume(), WithinRel(0.5 * 0.25 * 0.1, 1e-15));
    CHECK(b.contains({1.2, 2.1, 3.04}));
    CHECK_FALSE(b.contains({1.3, 2.0, 3.0}));
    CHECK_THROWS_AS(BoxVolume({0, 0, 0}, 0.0, 1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(BoxVolume({0, 0, 0}, 1.0, -1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(BoxVolume({0, 0, 0}, 1.0, 1.0, std::numeric_limits<double>::infinity()), InvalidParameter);
}

TEST_CASE("Green function magnitude halves when the distance doubles")
{
    const auto p = SignalParams::from_wavelength(0.01);
    const Point3 s{0.1, -0.2, 0.3};
    const double d = 0.37;
    const cplx g1 = green_yy(p, s + Point3{0, 0, d}, s);
    const cplx g2 = green_yy(p, s + Point3{0, 0, 2 * d}, s);
    CHECK_THAT(std::abs(g1) / std::abs(g2), WithinRel(2.0, 1e-12));
}

TEST_CASE("Green function matches the reference implementation")
{
    const auto p = SignalParams::from_wavelength(0.0123);
    const oracle::Medium m{p.wavelength_m, std::abs(p.beta)};
    const Point3 a{0.3, 0.1, -0.2}, b{-0.05, 0.4, 0.6};
    const cplx g = green_yy(p, a, b);
    const oracle::cd o = oracle::green(m, {a.x, a.y, a.z}, {b.x, b.y, b.z});
    CHECK_THAT(std::abs(g), WithinRel(std::abs(o), 1e-12));
    // -beta = j |beta| for the default prefactor
    CHECK_THAT(std::abs(g / o - cplx(0.0, 1.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("Green function is reciprocal and advances by pi over half a wavelength")
{
    const auto p = SignalParams::from_wavelength(0.01);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i)
    {
        const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        CHECK(green_yy(p, a, b) == green_yy(p, b, a));
    }
    const Point3 s{0, 0, 0};
    const double d = 5.0;
    const double dphi = std::arg(green_yy(p, {0, 0, d + p.wavelength_m / 2}, s) / green_yy(p, {0, 0, d}, s));
    CHECK_THAT(std::abs(dphi), WithinAbs(pi, 1e-9));
    CHECK_THROWS_AS(green_yy(p, s, s), SingularPoint);
}

TEST_CASE("Green function decays exactly as 1/d along any direction")
{
    const auto p = SignalParams::from_wavelength(0.02);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i)
    {
        Point3 dir{n(rng), n(rng), n(rng)};
        dir = dir / dir.norm();
        const double ref = std::abs(green_yy(p, dir * 0.1, {})) * 0.1;
        for (double d : {0.3, 1.7, 12.0, 250.0})
            CHECK_THAT(std::abs(green_yy(p, dir * d, {})) * d, WithinRel(ref, 1e-12));
    }
}

TEST_CASE("Focusing phase at the origin, half-wave offset and the quadratic term")
{
    const auto p = SignalParams::from_wavelength(0.01);
    const double r = 0.8;
    const cplx f0 = focusing_phase(p, {0, 0, 0}, r);
    CHECK_THAT(std::abs(f0 - cplx(1.0, 0.0)), WithinAbs(0.0, 1e-15));
    const cplx fz = focusing_phase(p, {0, 0, p.wavelength_m / 2}, r);
    CHECK_THAT(std::abs(fz - cplx(-1.0, 0.0)), WithinAbs(0.0, 1e-12));
    // x^2 = lambda r gives a path of -lambda / 2
    const double x = std::sqrt(p.wavelength_m * r);
    const cplx fx = focusing_phase(p, {x, 0, 0}, r);
    const cplx direct = std::exp(cplx(0.0, -p.wavenumber * (0.0 - x * x / (2.0 * r))));
    CHECK_THAT(std::abs(fx - direct), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(fx - cplx(-1.0, 0.0)), WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(focusing_phase(p, {0, 0, 0}, 0.0), InvalidParameter);
}

TEST_CASE("Focusing phase has unit modulus")
{
    const auto p = SignalParams::from_wavelength(0.0099);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.3, 0.3), r(0.05, 30.0);
    for (int i = 0; i < 1000; ++i)
        CHECK_THAT(std::abs(focusing_phase(p, {u(rng), u(rng), u(rng)}, r(rng))), WithinAbs(1.0, 1e-12));
}

TEST_CASE("Local frame maps the element to the origin and the target onto the z axis")
{
    const Point3 c{0.2, -0.1, 0.05}, t{-0.4, 0.3, 0.9};
    const Point3 o = local_frame(c, t, c);
    CHECK_THAT(o.norm(), WithinAbs(0.0, 1e-15));
    const Point3 lt = local_frame(c, t, t);
    CHECK_THAT(lt.x, WithinAbs(0.0, 1e-12));
    CHECK_THAT(lt.y, WithinAbs(0.0, 1e-12));
    CHECK_THAT(lt.z, WithinRel(distance(c, t), 1e-12));
    // Target along global y takes the fallback axes
    const Point3 ly = local_frame({0, 0, 0}, {0, 2, 0}, {0, 2, 0});
    CHECK_THAT(ly.z, WithinRel(2.0, 1e-12));
    CHECK_THROWS_AS(LocalFrame(c, c), DegenerateFrame);
}

TEST_CASE("Local frame is an isometry")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i)
    {
        const Point3 c{u(rng), u(rng), u(rng)}, t{u(rng), u(rng), u(rng)};
        const LocalFrame f(c, t);
        const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        CHECK_THAT(f.to_local(a).norm(), WithinRel(distance(a, c), 1e-12));
        CHECK_THAT(distance(f.to_local(a), f.to_local(b)), WithinRel(distance(a, b), 1e-12));
    }
}

TEST_CASE("dB conversions round-trip")
{
    for (double v : {1e-12, 0.5, 1.0, 4.0, 3e7})
        CHECK_THAT(from_db(to_db(v)), WithinRel(v, 1e-12));
    CHECK_THAT(to_db(4.0), WithinAbs(6.0206, 1e-4));
}
