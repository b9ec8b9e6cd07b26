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

#include <starris/hybrid_scenario.hpp>

#include <random>
#include <sstream>

using namespace starris;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    constexpr double deg = pi / 180.0;

    double spread_db(const std::vector<double> &v)
    {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return to_db(*hi) - to_db(*lo);
    }
} // namespace

TEST_CASE("Base-station sector pattern")
{
    CHECK(bs_directivity_db(0.0) == 0.0);
    CHECK_THAT(bs_directivity_db(65 * deg), WithinAbs(-12.0, 1e-12));
    CHECK_THAT(bs_directivity_db(65 * std::sqrt(2.5) * deg), WithinAbs(-30.0, 1e-9));
    CHECK(bs_directivity_db(102.8 * deg) == -30.0);
    CHECK(bs_directivity_db(pi) == -30.0);
    for (double t = -pi; t <= pi; t += 0.01)
    {
        CHECK(bs_directivity_db(t) == bs_directivity_db(-t));
        CHECK(bs_directivity_db(t) <= 0.0);
        CHECK(bs_directivity_db(t) >= -30.0);
    }
    const double clamp = 65 * std::sqrt(2.5) * deg;
    CHECK_THAT(bs_directivity_db(clamp - 1e-9), WithinAbs(bs_directivity_db(clamp + 1e-9), 1e-6));
    CHECK_THROWS_AS(bs_directivity_db(4.0), InvalidParameter);
}

TEST_CASE("Outdoor gain without the surface")
{
    const RoomScene s;
    const double g0 = gain_outdoor_no_star(s, 0.0, 20.0, 0.01);
    CHECK_THAT(g0, WithinRel(0.01 / 20.0, 1e-15));
    CHECK_THAT(to_db(g0) - to_db(gain_outdoor_no_star(s, 65 * deg, 20.0, 0.01)), WithinAbs(12.0, 1e-9));
    CHECK(gain_outdoor_no_star(s, 110 * deg, 20.0, 0.01) == gain_outdoor_no_star(s, 150 * deg, 20.0, 0.01));
    for (double t = 1 * deg; t < 100 * deg; t += 1 * deg)
        CHECK(gain_outdoor_no_star(s, t + deg, 20.0, 0.01) < gain_outdoor_no_star(s, t, 20.0, 0.01));
    CHECK(gain_outdoor_no_star(s, 0.3, 40.0, 0.01) < gain_outdoor_no_star(s, 0.3, 20.0, 0.01));
    CHECK_THROWS_AS(gain_outdoor_no_star(s, 0.3, 0.0, 0.01), InvalidParameter);
}

TEST_CASE("Indoor diffraction law")
{
    const RoomScene s;
    auto g = [&](double t, double r) { return gain_indoor_no_star(s, t, r, 0.01, s.params); };
    CHECK_THAT(g(30 * deg, 2.0) / g(90 * deg, 2.0), WithinRel(4.0, 1e-12));
    CHECK_THAT(to_db(g(30 * deg, 2.0)) - to_db(g(90 * deg, 2.0)), WithinAbs(6.0206, 1e-4));
    CHECK_THAT(g(45 * deg, 2.0) / g(90 * deg, 2.0), WithinRel(2.0, 1e-12));
    CHECK_THAT(g(60 * deg, 4.0) / g(60 * deg, 2.0), WithinRel(0.5, 1e-12));
    CHECK_THROWS_AS(g(0.0, 2.0), SingularAngle);
    CHECK_THROWS_AS(g(-0.1, 2.0), InvalidParameter);

    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> th(1e-3, pi / 2), r(0.1, 10.0);
    const double c = g(pi / 2, 1.0);
    for (int i = 0; i < 500; ++i)
    {
        const double t = th(rng), d = r(rng);
        CHECK_THAT(g(t, d) * std::sin(t) * std::sin(t) * d, WithinRel(c, 1e-12));
    }
}

TEST_CASE("Regimes of the hybrid users")
{
    const RoomScene s;
    const BoxVolume star = s.star_box();
    const UserSpec f = s.surface_user(s.user_f), n = s.surface_user(s.user_n);
    CHECK(f.side == Side::Reflection);
    CHECK(n.side == Side::Transmission);
    const double rb = field_boundary(s.params, star, f.receive_volume);
    CHECK(distance(f.position, star.center) > rb);
    CHECK(distance(n.position, star.center) < rb);
    CHECK(partition_tiles(s.params, star, f.receive_volume, f.position).size() == 1);
    const double dv_f = max_farfield_volume(s.params, f.receive_volume, s.r_sf_m, star.extent_z);
    CHECK_THAT(dv_f / star.extent_z, WithinRel(2.0, 0.05));
    CHECK(dv_f > 5 * star.volume());
    CHECK(std::abs(double(analytic_dof(s.params, star, n.receive_volume, s.r_sn_m)) - 12.0) <= 2.0);

    RoomScene bad = s;
    bad.user_f = bad.outdoor_user_at(45 * deg);
    bad.r_sf_m = 5.0;
    bad.user_f = bad.outdoor_user_at(45 * deg);
    CHECK_THROWS_AS(gain_with_star(bad, {Strategy::PS, {}, 0}, HybridTarget::F), RegimeMismatch);
    RoomScene bad_n = s;
    bad_n.user_n = {12.0, 2.0, 0.0};
    CHECK_THROWS_AS(gain_with_star(bad_n, {Strategy::PS, {}, 0}, HybridTarget::N), RegimeMismatch);
}

TEST_CASE("Surface-aided gains of the hybrid users")
{
    const RoomScene s;
    const RisLayout l = s.star_layout();
    const auto users = std::vector<UserSpec>{s.surface_user(s.user_f), s.surface_user(s.user_n)};
    const auto grouping = make_grouping(Strategy::SEG, l, users);
    const double reg = gain_with_star(s, {Strategy::REG, grouping, 0}, HybridTarget::F);
    const double seg = gain_with_star(s, {Strategy::SEG, grouping, 0}, HybridTarget::F);
    CHECK(reg == seg);

    // Every element serving the outdoor user leaves the plain far-field array gain
    const std::vector<std::size_t> all_f(l.size(), 0);
    const double r_f = distance(users[0].position, {0, 0, 0});
    const double s4 = 4 * pi * r_f;
    const double m = double(l.size());
    const double expect = s.budget().friis_factor() * s.params.beta_sq() * users[0].receive_volume.volume() *
                          l.element_volume() * m * m / (s4 * s4);
    CHECK_THAT(gain_with_star(s, {Strategy::REG, all_f, 0}, HybridTarget::F), WithinRel(expect, 1e-12));

    for (Strategy k : {Strategy::PS, Strategy::REG, Strategy::SEG})
        for (HybridTarget t : {HybridTarget::F, HybridTarget::N})
        {
            const double g = gain_with_star(s, {k, {}, 3}, t);
            CHECK(std::isfinite(g));
            CHECK(g > 0.0);
        }
    CHECK_THROWS_AS(gain_with_star(s, {Strategy::REG, {0, 1}, 0}, HybridTarget::F), InvalidGrouping);
}

TEST_CASE("Angle sweep flattens both users")
{
    const RoomScene s;
    std::vector<double> angles;
    for (double a = 5; a <= 85.0 + 1e-9; a += 5)
        angles.push_back(a * deg);
    const auto rows = angle_sweep(s, angles);
    REQUIRE(rows.size() == angles.size());
    std::vector<double> f_ps, n_ps, n_no, f_no;
    for (const auto &r : rows)
    {
        f_ps.push_back(r.gain_f_ps), n_ps.push_back(r.gain_n_ps);
        f_no.push_back(r.gain_f_no_star), n_no.push_back(r.gain_n_no_star);
        CHECK_THAT(distance(s.with_angles(r.theta, r.theta).user_n, s.window_center()), WithinRel(s.r_sn_m, 1e-12));
    }
    CHECK(spread_db(f_ps) <= 3.0);
    CHECK(spread_db(n_ps) <= 3.0);
    CHECK(spread_db(f_no) > 10.0);
    CHECK(spread_db(n_no) > 10.0);
    CHECK_THROWS_AS(angle_sweep(s, {0.0}), InvalidParameter);
    CHECK_THROWS_AS(angle_sweep(s, {pi / 2}), InvalidParameter);
}

TEST_CASE("Coverage maps of the room")
{
    const RoomScene s;
    const double res = 10.0;
    const CoverageGrid none = coverage_grid(s, CoverageMode::NoWindow, std::nullopt, res);
    const CoverageGrid open = coverage_grid(s, CoverageMode::OpenWindow, std::nullopt, res);
    const CoverageGrid star = coverage_grid(s, CoverageMode::StarRis, std::nullopt, res);
    REQUIRE(none.nx == 40);
    REQUIRE(none.ny == 40);

    auto extreme = [](const CoverageGrid &g, bool want_min)
    {
        std::size_t best = 0;
        double v = want_min ? 1e300 : -1e300;
        for (std::size_t i = 0; i < g.values.size(); ++i)
            if (!std::isnan(g.values[i]) && (want_min ? g.values[i] < v : g.values[i] > v))
                v = g.values[i], best = i;
        return g.cell_center(best % g.nx, best / g.nx);
    };
    const Point3 lo = extreme(none, true);
    CHECK(lo.x < 1.0);
    CHECK(lo.y > 3.0);
    const Point3 hi = extreme(open, false);
    CHECK(std::abs(hi.y - s.window_center_y_m) <= 0.25);

    for (std::size_t iy = 0; iy < star.ny; ++iy)
        for (std::size_t ix = 0; ix < star.nx; ++ix)
        {
            const Point3 c = star.cell_center(ix, iy);
            if (std::isnan(star.at(ix, iy)) || std::abs(c.x - s.focus.x) > s.zone_side_m / 2 ||
                std::abs(c.y - s.focus.y) > s.zone_side_m / 2)
                continue;
            CHECK(star.at(ix, iy) >= open.at(ix, iy));
        }
    const double z_star = star.zone_average_db(s.focus, s.zone_side_m);
    CHECK(z_star - none.zone_average_db(s.focus, s.zone_side_m) >= 3.0);
    CHECK(z_star - open.zone_average_db(s.focus, s.zone_side_m) >= 1.0);

    // The shadow-edge guard band is masked
    CHECK(std::isnan(none.at(none.nx - 1, 0)));
    CHECK_THROWS_AS(coverage_grid(s, CoverageMode::NoWindow, std::nullopt, 5.0), InvalidParameter);
}

TEST_CASE("Coverage raster format")
{
    CoverageGrid g;
    g.nx = 3, g.ny = 2, g.cell_m = 0.5;
    g.values = {1.0, std::numeric_limits<double>::quiet_NaN(), -2.5, 0.0, 3.25, 4.0};
    std::ostringstream os;
    g.write_raster(os);
    CHECK(os.str() == "3 2 0.5 0.00\n1.00 NaN -2.50\n0.00 3.25 4.00\n");
}

TEST_CASE("Scene validation")
{
    RoomScene s;
    s.window_center_y_m = 0.1;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    RoomScene t;
    t.element_width_m = 0.1;
    CHECK_THROWS_AS(t.validate(), InvalidParameter);
    RoomScene u;
    u.room_x_m = 0.0;
    CHECK_THROWS_AS(u.validate(), InvalidParameter);
    RoomScene v;
    v.r_sn_m = 0.5;
    CHECK_THROWS_AS(v.indoor_user_at(0.1), InvalidParameter);
}
