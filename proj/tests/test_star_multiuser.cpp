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

#include <starris/kernel.hpp>
#include <starris/regions.hpp>
#include <starris/star_multiuser.hpp>

#include <support/oracles.hpp>

#include <random>

using namespace starris;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const LinkBudget budget{1.0, 10.0, 0.01};
    const SignalParams P = SignalParams::from_wavelength(0.01);

    // Surface of 1 cm elements, 5 mm thick, centered on the origin
    RisLayout surface(double side, double thick = 0.005)
    {
        const std::size_t n = std::size_t(std::lround(side / 0.01));
        return RisLayout::grid({0, 0, 0}, n, n, 0.01, 0.01, thick);
    }

    std::vector<UserSpec> pair(const Point3 &p, const Point3 &q, double rx = 0.01)
    {
        return {UserSpec::at(p, rx, rx, rx), UserSpec::at(q, rx, rx, rx)};
    }

    double unit_term(const UserSpec &u, double v_m, const Point3 &at)
    {
        const double s = 4.0 * pi * distance(at, u.position);
        return budget.friis_factor() * P.beta_sq() * u.receive_volume.volume() * v_m / (s * s);
    }

    double mean_reg(const RisLayout &l, const std::vector<UserSpec> &u, std::size_t p, std::uint64_t seeds)
    {
        double acc = 0.0;
        for (std::uint64_t s = 0; s < seeds; ++s)
            acc += gain_reg(P, budget, l, u, make_grouping(Strategy::REG, l, u, s), p);
        return acc / double(seeds);
    }
} // namespace

TEST_CASE("Angle between users")
{
    const Point3 o{0, 0, 0};
    CHECK_THAT(angle_between_users(o, {0, 0, 1}, {0, 0, 3}), WithinAbs(0.0, 1e-12));
    CHECK_THAT(angle_between_users(o, {0, 0, 1}, {0, 0, -2}), WithinAbs(pi, 1e-12));
    CHECK_THAT(angle_between_users(o, {0, 0, 1}, {2, 0, 0}), WithinAbs(pi / 2, 1e-12));
    CHECK_THROWS_AS(angle_between_users(o, o, {1, 0, 0}), DegenerateFrame);
}

TEST_CASE("Coherence factor")
{
    CHECK(xi_factor(P, 0.0, 0.005) == 0.0);
    CHECK(sinc(0.0) == 1.0);
    CHECK_THAT(xi_factor(P, pi / 2, 0.005), WithinRel(pi / 2, 1e-12));
    CHECK_THAT(sinc(xi_factor(P, pi / 2, 0.005)), WithinRel(2.0 / pi, 1e-12));
    CHECK_THAT(xi_factor(P, pi, 0.0025), WithinRel(2.0 * pi * 0.25, 1e-12));
    for (double x = 1e-6; x < 50.0; x *= 1.3)
        CHECK(sinc(x) < 1.0);
    CHECK_THROWS_AS(xi_factor(P, 0.3, 0.0), InvalidParameter);
}

TEST_CASE("Single-user limits")
{
    const RisLayout l = surface(0.1);
    const std::vector<UserSpec> u{UserSpec::at({0.05, -0.02, 0.4}, 0.01, 0.01, 0.01)};
    double per_element = 0.0;
    for (const auto &e : l.elements)
        per_element += unit_term(u[0], e.volume(), e.center);
    CHECK_THAT(gain_ps(P, budget, l, u, 0), WithinRel(per_element, 1e-9));

    const auto part = partition_tiles(P, l.bounding_box(), u[0].receive_volume, u[0].position);
    std::vector<double> count(part.size(), 0.0);
    for (const auto &e : l.elements)
        count[part.tile_index(e.center)] += 1.0;
    double per_tile = 0.0;
    for (std::size_t i = 0; i < part.size(); ++i)
        per_tile += unit_term(u[0], l.element_volume(), part.tiles[i].box.center) * count[i] * count[i];
    const std::vector<std::size_t> all(l.size(), 0);
    CHECK_THAT(gain_reg(P, budget, l, u, all, 0), WithinRel(per_tile, 1e-9));
    CHECK_THAT(gain_seg(P, budget, l, u, all, 0), WithinRel(per_tile, 1e-9));
    CHECK(make_grouping(Strategy::SEG, l, u) == all);
    CHECK(make_grouping(Strategy::REG, l, u, 9) == all);
}

TEST_CASE("Co-located users share the element current")
{
    const BoxVolume e({0, 0, 0}, 0.01, 0.01, 0.005);
    const auto same = std::vector<UserSpec>{UserSpec::at({0.1, 0, 0.5}, 0.01, 0.01, 0.01), UserSpec::at({0.1, 0, 0.5}, 0.01, 0.01, 0.01)};
    CHECK_THAT(ps_normalization(P, e, same), WithinRel(4.0, 1e-12));

    RisLayout l = surface(0.04);
    const auto close = pair({0.1, 0, 0.5}, {0.1, 1e-7, 0.5});
    const std::vector<UserSpec> one{close[0]};
    CHECK_THAT(gain_ps(P, budget, l, close, 0), WithinRel(gain_ps(P, budget, l, one, 0), 1e-6));
    CHECK_THROWS_AS(gain_ps(P, budget, l, same, 0), InvalidParameter);
}

TEST_CASE("Power splitting against direct current superposition")
{
    // Users mirrored on the axis; elements spread over a square of 30 cm
    for (double d : {0.8, 1.0})
    {
        const double dz = P.wavelength_m / 4, es = 0.01, rxs = 0.2;
        RisLayout l;
        std::vector<oracle::Element> els;
        for (double x : {-0.15, 0.15})
            for (double y : {-0.15, 0.15})
            {
                l.elements.emplace_back(Point3{x, y, 0}, es, es, dz);
                els.push_back({{x, y, 0}, {es, es, dz}});
            }
        l.modes.assign(4, RisType::Star);
        const std::vector<UserSpec> u{UserSpec::at({0, 0, d}, rxs, rxs, rxs), UserSpec::at({0, 0, -d}, rxs, rxs, rxs)};
        const oracle::Medium m{P.wavelength_m, std::abs(P.beta)};
        const std::vector<oracle::V3> us{{0, 0, d}, {0, 0, -d}};
        const auto src = oracle::ps_source(m, els, us, 4, 4);
        for (std::size_t q = 0; q < 2; ++q)
        {
            const auto rx = oracle::box_samples(us[q], {rxs, rxs, rxs}, 40, 40, 40);
            const double o = budget.friis_factor() * oracle::received_power(m, src, rx);
            CHECK_THAT(gain_ps(P, budget, l, u, q), WithinRel(o, 0.1));
        }
    }
}

TEST_CASE("Random grouping against direct current superposition")
{
    const double dz = P.wavelength_m / 4, es = 0.01, rs = 0.01;
    RisLayout l;
    std::vector<oracle::Element> els;
    for (double x : {-0.005, 0.005})
        for (double y : {-0.005, 0.005})
        {
            l.elements.emplace_back(Point3{x, y, 0}, es, es, dz);
            els.push_back({{x, y, 0}, {es, es, dz}});
        }
    l.modes.assign(4, RisType::Star);
    l.clusters.assign(4, 0);
    const oracle::Medium m{P.wavelength_m, std::abs(P.beta)};
    for (double d : {0.4, 0.6})
    {
        const std::vector<UserSpec> u{UserSpec::at({0, 0, d}, rs, rs, rs), UserSpec::at({0, 0, -d}, rs, rs, rs)};
        const std::vector<oracle::V3> us{{0, 0, d}, {0, 0, -d}};
        for (const auto &grp : {std::vector<std::size_t>{0, 1, 0, 1}, std::vector<std::size_t>{0, 0, 0, 1}})
        {
            const auto src = oracle::grouped_source(m, els, grp, us, 4, 4);
            for (std::size_t p = 0; p < 2; ++p)
            {
                const auto rx = oracle::box_samples(us[p], {rs, rs, rs}, 4, 4, 4);
                const double o = budget.friis_factor() * oracle::received_power(m, src, rx);
                CHECK_THAT(gain_reg(P, budget, l, u, grp, p), WithinRel(o, 0.1));
            }
        }
    }
}

TEST_CASE("Equal split in one tile at a right angle")
{
    // Half-wave elements and users at right angles seen from the tile center
    const double a = 0.4;
    RisLayout l;
    for (double x : {-0.005, 0.005})
        for (double y : {-0.005, 0.005})
            l.elements.emplace_back(Point3{x, y, 0}, 0.01, 0.01, P.wavelength_m / 2);
    l.modes.assign(4, RisType::Star);
    l.clusters.assign(4, 0);
    const auto u = pair({-a, 0, a}, {a, 0, a});
    const double m = 4.0;
    const double expect = unit_term(u[0], l.element_volume(), {0, 0, 0}) * (m / 2) * (m / 2) * std::pow(1 + 2 / pi, 2);
    CHECK_THAT(gain_reg(P, budget, l, u, {0, 1, 1, 0}, 0), WithinRel(expect, 1e-12));
    CHECK_THAT(gain_reg(P, budget, l, u, {0, 1, 1, 0}, 1), WithinRel(expect, 1e-12));
}

TEST_CASE("Grouping validation")
{
    const RisLayout l = surface(0.04);
    const auto u = pair({-0.1, 0, 0.5}, {0.1, 0, -0.5});
    CHECK_THROWS_AS(gain_reg(P, budget, l, u, std::vector<std::size_t>(3, 0), 0), InvalidGrouping);
    CHECK_THROWS_AS(gain_seg(P, budget, l, u, std::vector<std::size_t>(l.size(), 2), 0), InvalidGrouping);
    CHECK_THROWS_AS(make_grouping(Strategy::SEG, RisLayout::grid({0, 0, 0}, 1, 1, 0.01, 0.01, 0.005), u), InvalidParameter);
    CHECK_THROWS_AS(make_grouping(Strategy::PS, l, u), InvalidParameter);
    CHECK_THROWS_AS(gain_ps(P, budget, l, {UserSpec::at({0, 0, 0.001}, 0.01, 0.01, 0.01)}, 0), SingularPoint);
}

TEST_CASE("Groupings are balanced partitions")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> side(2, 9), users(1, 4);
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    for (int i = 0; i < 50; ++i)
    {
        const RisLayout l = RisLayout::grid({0, 0, 0}, side(rng), side(rng), 0.01, 0.01, 0.005);
        std::vector<UserSpec> u;
        const std::size_t n = std::min(users(rng), l.size());
        for (std::size_t k = 0; k < n; ++k)
            u.push_back(UserSpec::at({c(rng), c(rng), k % 2 ? 0.5 : -0.5}, 0.01, 0.01, 0.01));
        for (Strategy s : {Strategy::SEG, Strategy::REG})
        {
            const auto g = make_grouping(s, l, u, std::uint64_t(i));
            std::vector<std::size_t> size(n, 0);
            for (std::size_t x : g)
                ++size.at(x);
            for (std::size_t k = 0; k < n; ++k)
                CHECK(std::abs(double(size[k]) - double(l.size()) / double(n)) < 1.0);
        }
        CHECK(make_grouping(Strategy::REG, l, u, 42) == make_grouping(Strategy::REG, l, u, 42));
    }
}

TEST_CASE("Selective grouping of mirrored users splits along the bisector")
{
    const RisLayout l = surface(0.2);
    const auto u = pair({-0.3, 0, 0.5}, {0.3, 0, -0.5});
    const auto g = make_grouping(Strategy::SEG, l, u);
    for (std::size_t m = 0; m < l.size(); ++m)
        CHECK(g[m] == (l.elements[m].center.x < 0 ? 0u : 1u));
    CHECK_THAT(gain_seg(P, budget, l, u, g, 0), WithinRel(gain_seg(P, budget, l, u, g, 1), 1e-9));
    CHECK_THAT(gain_ps(P, budget, l, u, 0), WithinRel(gain_ps(P, budget, l, u, 1), 1e-9));
}

TEST_CASE("Sum rate")
{
    CHECK(sum_rate({0.0, 0.0}, 1.0, 1.0) == 0.0);
    CHECK_THAT(sum_rate({2.0}, 0.5, 1.0), WithinAbs(1.0, 1e-15));
    const std::vector<double> g{1e3, 2e3, 5e2};
    std::vector<double> g2 = g;
    for (double &x : g2)
        x *= 2;
    CHECK_THAT(sum_rate(g2, 1.0, 1.0) - sum_rate(g, 1.0, 1.0), WithinAbs(3.0, 0.01));
    CHECK(sum_rate({1.0, 2.0}, 1.0, 1.0) < sum_rate({1.0, 2.1}, 1.0, 1.0));
    CHECK_THROWS_AS(sum_rate(g, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("Strategy ordering on the two-sided layout")
{
    const auto u = pair({-0.5, 0, -0.5}, {0.3, 0, 0.5});
    std::vector<std::array<double, 3>> rates;
    std::vector<std::array<std::vector<double>, 3>> gains;
    double peak = 0.0;
    for (double side : {0.2, 0.4, 0.6})
    {
        const RisLayout l = surface(side);
        const auto seg = make_grouping(Strategy::SEG, l, u);
        std::array<std::vector<double>, 3> g;
        for (std::size_t p = 0; p < 2; ++p)
        {
            g[0].push_back(gain_ps(P, budget, l, u, p));
            g[1].push_back(mean_reg(l, u, p, 4));
            g[2].push_back(gain_seg(P, budget, l, u, seg, p));
            peak = std::max(peak, g[2].back());
        }
        gains.push_back(g);
    }
    const double noise = peak / std::pow(10.0, 2.5);
    for (const auto &g : gains)
    {
        const double ps = sum_rate(g[0], 1.0, noise), reg = sum_rate(g[1], 1.0, noise), seg = sum_rate(g[2], 1.0, noise);
        CHECK(seg > reg);
        CHECK(reg > ps);
    }
}

TEST_CASE("Random grouping never beats selective grouping on average")
{
    const RisLayout l = surface(0.2);
    const auto u = pair({-0.5, 0, -0.5}, {0.3, 0, 0.5});
    const auto seg = make_grouping(Strategy::SEG, l, u);
    for (std::size_t p = 0; p < 2; ++p)
        CHECK(mean_reg(l, u, p, 100) <= gain_seg(P, budget, l, u, seg, p));
}

namespace
{
    void check_seg_over_reg(std::uniform_real_distribution<double> xp, std::uniform_real_distribution<double> xq,
                            std::uniform_real_distribution<double> y)
    {
        // Both users well inside the radiating near field of the 40 cm surface (r_b = 0.8 m)
        std::mt19937_64 rng(37);
        std::uniform_real_distribution<double> z(0.2, 0.4);
        const RisLayout l = surface(0.4);
        for (int i = 0; i < 20; ++i)
        {
            const auto u = pair({xp(rng), y(rng), -z(rng)}, {xq(rng), y(rng), z(rng)});
            for (const auto &v : u)
            {
                REQUIRE(distance(v.position, {0, 0, 0}) < field_boundary(P, l.bounding_box(), v.receive_volume) * 0.75);
                REQUIRE(partition_tiles(P, l.bounding_box(), v.receive_volume, v.position).size() >= 2);
            }
            const auto seg = make_grouping(Strategy::SEG, l, u);
            const auto reg = make_grouping(Strategy::REG, l, u, std::uint64_t(i));
            for (std::size_t p = 0; p < 2; ++p)
                CHECK(gain_seg(P, budget, l, u, seg, p) >= gain_reg(P, budget, l, u, reg, p));
        }
    }
} // namespace

TEST_CASE("Selective grouping dominates random grouping on random near-field geometries")
{
    // Users on opposite lateral halves, so each nearest half is uncontested
    check_seg_over_reg(std::uniform_real_distribution<double>(-0.4, -0.1), std::uniform_real_distribution<double>(0.1, 0.4),
                       std::uniform_real_distribution<double>(-0.1, 0.1));
}

// When both users want the same elements the balanced grouping hands one of them its far half, see the decisions log
TEST_CASE("Selective grouping dominates random grouping when users contend for elements", "[!mayfail]")
{
    check_seg_over_reg(std::uniform_real_distribution<double>(-0.3, 0.3), std::uniform_real_distribution<double>(-0.3, 0.3),
                       std::uniform_real_distribution<double>(-0.3, 0.3));
}

TEST_CASE("Gains are invariant under rigid translation")
{
    const RisLayout l = surface(0.1);
    const auto u = pair({-0.2, 0.05, -0.4}, {0.15, 0, 0.3});
    const Point3 t{1.3, -2.1, 0.7};
    RisLayout lt = l;
    for (auto &e : lt.elements)
        e.center = e.center + t;
    const std::vector<UserSpec> ut{UserSpec::at(u[0].position + t, 0.01, 0.01, 0.01, t.z),
                                   UserSpec::at(u[1].position + t, 0.01, 0.01, 0.01, t.z)};
    const auto seg = make_grouping(Strategy::SEG, l, u);
    CHECK(make_grouping(Strategy::SEG, lt, ut) == seg);
    for (std::size_t p = 0; p < 2; ++p)
    {
        CHECK_THAT(gain_ps(P, budget, lt, ut, p), WithinRel(gain_ps(P, budget, l, u, p), 1e-9));
        CHECK_THAT(gain_seg(P, budget, lt, ut, seg, p), WithinRel(gain_seg(P, budget, l, u, seg, p), 1e-9));
        CHECK_THAT(gain_reg(P, budget, lt, ut, seg, p), WithinRel(gain_reg(P, budget, l, u, seg, p), 1e-9));
        CHECK(gain_ps(P, budget, l, u, p) >= 0.0);
    }
}

TEST_CASE("A user's selective half carries no more DoF than the whole surface")
{
    const RisLayout l = surface(0.06, 0.0025);
    const auto u = pair({-0.02, 0, -0.1}, {0.02, 0, 0.1}, 0.03);
    const auto seg = make_grouping(Strategy::SEG, l, u);
    for (std::size_t p = 0; p < 2; ++p)
    {
        std::vector<std::size_t> mine;
        for (std::size_t m = 0; m < l.size(); ++m)
            if (seg[m] == p)
                mine.push_back(m);
        auto dof = [&](const BoxVolume &b)
        {
            const auto &rx = u[p].receive_volume;
            return effective_dof(build_kernel_matrix(P, QuadratureGrid::with_density(b, P), rx, QuadratureGrid::with_density(rx, P)));
        };
        CHECK(dof(l.bounding_box(mine)) <= dof(l.bounding_box()));
    }
}
