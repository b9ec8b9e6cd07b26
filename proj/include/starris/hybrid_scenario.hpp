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

#ifndef STARRIS_HYBRID_SCENARIO_HPP
#define STARRIS_HYBRID_SCENARIO_HPP

#include "core_em.hpp"
#include "gain_single.hpp"
#include "regions.hpp"
#include "star_multiuser.hpp"

#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace starris
{
    inline constexpr double bs_beamwidth_3db = 65.0 * pi / 180.0;

    // Horizontal sector pattern in dB, clamped at -30 dB
    inline double bs_directivity_db(double theta)
    {
        if (!(theta >= -pi && theta <= pi))
            throw InvalidParameter("angle must lie in [-pi, pi]");
        const double t = theta / bs_beamwidth_3db;
        return -std::min(12.0 * t * t, 30.0);
    }

    // Outdoor-to-indoor scene. Global frame: origin at the bottom-left room corner, the wall with the
    // window on the y-axis, the room in x > 0, y > 0, the plane wave travelling along +x, cells at z = 0.
    // The surface frame used for all surface computations maps (x, y, z) to (y - window_center_y, z, x),
    // so the surface normal is its z-axis and the room lies on the transmission side.
    struct RoomScene
    {
        SignalParams params = SignalParams::from_wavelength(0.0099);
        double room_x_m = 4.0, room_y_m = 4.0;
        double window_center_y_m = 2.0;
        double window_width_m = 0.5;    // Along the wall
        double window_height_m = 0.5;   // Along z
        double star_thickness_m = 0.05; // Wall normal
        double element_size_m = 0.01;   // Lateral element pitch
        double element_width_m = 0.0099 / 4.0; // Current-carrying element width along the normal
        double user_aperture_m2 = 0.01; // A_F and A_N
        double user_thickness_m = 0.01;
        double bs_distance_m = 100.0;
        double r_sn_m = 2.0;
        double r_sf_m = 20.0;
        Point3 user_f{-20.0 * std::cos(pi / 4.0), 2.0 + 20.0 * std::sin(pi / 4.0), 0.0}; // Global
        Point3 user_n{2.0, 2.0, 0.0};                                                     // Global
        Point3 focus{1.0, 3.0, 0.0};                                                      // Coverage focus, global
        double zone_side_m = 0.5;
        double guard_angle = 2.0 * pi / 180.0;
        double samples_per_wavelength = 2.0; // Sheet sampling for coverage fields
        double diffraction_cap_db = -6.0;

        void validate() const
        {
            auto pos = [](double v)
            { return v > 0.0 && std::isfinite(v); };
            if (!pos(room_x_m) || !pos(room_y_m) || !pos(window_width_m) || !pos(window_height_m) ||
                !pos(star_thickness_m) || !pos(element_size_m) || !pos(element_width_m) || !pos(user_aperture_m2) || !pos(user_thickness_m) ||
                !pos(bs_distance_m) || !pos(r_sn_m) || !pos(r_sf_m) || !pos(samples_per_wavelength))
                throw InvalidParameter("scene dimensions must be positive");
            if (element_width_m > star_thickness_m)
                throw InvalidParameter("element width exceeds the surface thickness");
            if (window_center_y_m - window_width_m / 2.0 < 0.0 || window_center_y_m + window_width_m / 2.0 > room_y_m)
                throw InvalidParameter("window must lie within the wall");
        }

        Point3 window_center() const { return {0.0, window_center_y_m, 0.0}; }

        Point3 to_surface(const Point3 &g) const { return {g.y - window_center_y_m, g.z, g.x}; }

        BoxVolume star_box() const { return BoxVolume({0.0, 0.0, 0.0}, window_width_m, window_height_m, star_thickness_m); }

        BoxVolume receiver_box(const Point3 &surface_pt) const
        {
            const double a = std::sqrt(user_aperture_m2);
            return BoxVolume(surface_pt, a, a, user_thickness_m);
        }

        UserSpec surface_user(const Point3 &global_pt) const
        {
            const double a = std::sqrt(user_aperture_m2);
            return UserSpec::at(to_surface(global_pt), a, a, user_thickness_m);
        }

        RisLayout star_layout() const
        {
            const auto nx = std::size_t(std::llround(window_width_m / element_size_m));
            const auto ny = std::size_t(std::llround(window_height_m / element_size_m));
            if (nx == 0 || ny == 0)
                throw InvalidParameter("element larger than the window");
            return RisLayout::grid({0.0, 0.0, 0.0}, nx, ny, window_width_m / double(nx), window_height_m / double(ny),
                                   element_width_m, RisType::Star);
        }

        LinkBudget budget() const
        {
            return {from_db(bs_directivity_db(0.0)), bs_distance_m, window_width_m * window_height_m};
        }

        // Indoor user at angle theta seen from O and distance r_SN from the surface center
        Point3 indoor_user_at(double theta) const
        {
            const double w = window_center_y_m, s = std::sin(theta);
            const double disc = w * w * s * s - w * w + r_sn_m * r_sn_m;
            if (disc < 0.0)
                throw InvalidParameter("no indoor point at this angle and distance");
            const double t = w * s + std::sqrt(disc);
            return {t * std::cos(theta), t * s, 0.0};
        }

        // Outdoor user at angle theta from the wall normal and distance r_SF from the surface center
        Point3 outdoor_user_at(double theta) const
        {
            return window_center() + Point3{-std::cos(theta), std::sin(theta), 0.0} * r_sf_m;
        }

        RoomScene with_angles(double theta_f, double theta_n) const
        {
            RoomScene s = *this;
            s.user_f = outdoor_user_at(theta_f);
            s.user_n = indoor_user_at(theta_n);
            return s;
        }
    };

    // Sidelobe-limited outdoor gain without the surface, proportional to D(theta) A_F / r_OF
    inline double gain_outdoor_no_star(const RoomScene &, double theta_f, double r_of, double aperture_f)
    {
        if (!(r_of > 0.0) || !(aperture_f > 0.0))
            throw InvalidParameter("distance and aperture must be positive");
        return from_db(bs_directivity_db(theta_f)) * aperture_f / r_of;
    }

    // Diffracted indoor gain A_N / (k^2 r lambda sin^2 theta), relative to the incident power density
    inline double gain_indoor_no_star(const RoomScene &, double theta_n, double r_on, double aperture_n, const SignalParams &params)
    {
        if (theta_n == 0.0)
            throw SingularAngle("diffraction law diverges on the shadow edge");
        if (!(theta_n > 0.0 && theta_n < pi))
            throw InvalidParameter("indoor angle must lie in (0, pi)");
        if (!(r_on > 0.0) || !(aperture_n > 0.0))
            throw InvalidParameter("distance and aperture must be positive");
        const double s = std::sin(theta_n), k = params.wavenumber;
        return aperture_n / (k * k * r_on * params.wavelength_m * s * s);
    }

    enum class HybridTarget
    {
        F, // Outdoor far-field user, reflection side
        N  // Indoor near-field user, transmission side
    };

    // End-to-end gain through the surface for the outdoor or indoor user
    inline double gain_with_star(const RoomScene &scene, const StrategyConfig &strategy, HybridTarget target)
    {
        scene.validate();
        const SignalParams &params = scene.params;
        const std::vector<UserSpec> users{scene.surface_user(scene.user_f), scene.surface_user(scene.user_n)};
        const BoxVolume star = scene.star_box();
        const double rb = field_boundary(params, star, users[0].receive_volume);
        const double r_f = distance(users[0].position, star.center), r_n = distance(users[1].position, star.center);
        if (!(r_f > rb))
            throw RegimeMismatch("outdoor user is not beyond the field boundary");
        if (r_n > rb)
            throw RegimeMismatch("indoor user is not within the field boundary");

        const RisLayout layout = scene.star_layout();
        const LinkBudget budget = scene.budget();
        const double pref = budget.friis_factor() * params.beta_sq();
        const double s_fn = sinc(xi_factor(params, angle_between_users(star.center, users[0].position, users[1].position),
                                           layout.element_width_z()));
        const double vr_f = users[0].receive_volume.volume();
        const double pf = 4.0 * pi * r_f;

        if (strategy.kind == Strategy::PS)
        {
            if (target == HybridTarget::N)
                return gain_ps(params, budget, layout, users, 1, 4.0);
            const BoxVolume &centre_element = layout.elements[layout.size() / 2];
            const BoxVolume probe(star.center, centre_element.extent_x, centre_element.extent_y, centre_element.extent_z);
            const double a_m = ps_normalization(params, probe, users, 4.0);
            return pref * vr_f * star.volume() * (1.0 + s_fn) * (1.0 + s_fn) / (pf * pf * a_m);
        }

        std::vector<std::size_t> grouping = strategy.grouping;
        if (grouping.empty())
            grouping = make_grouping(strategy.kind, layout, users, strategy.rng_seed);
        if (target == HybridTarget::N)
            return strategy.kind == Strategy::REG ? gain_reg(params, budget, layout, users, grouping, 1)
                                                  : gain_seg(params, budget, layout, users, grouping, 1);
        if (grouping.size() != layout.size())
            throw InvalidGrouping("grouping must label every element exactly once");
        double m_f = 0.0, m_n = 0.0;
        for (std::size_t g : grouping)
            (g == 0 ? m_f : m_n) += 1.0;
        return pref * vr_f * layout.element_volume() / (pf * pf) * (m_f * m_f + (m_n * s_fn) * (m_n * s_fn));
    }

    // ------------------------------------------------------------------------------------------------
    // Indoor coverage

    enum class CoverageMode
    {
        NoWindow,
        OpenWindow,
        StarRis
    };

    inline std::string_view to_string(CoverageMode m)
    {
        return m == CoverageMode::NoWindow ? "no-window" : m == CoverageMode::OpenWindow ? "open-window" : "star-ris";
    }

    struct CoverageGrid
    {
        double resolution = 20.0; // Cells per metre
        std::size_t nx = 0, ny = 0;
        double cell_m = 0.05;
        double reference_db = 0.0;   // Incident plane-wave power density
        std::vector<double> values;  // dB, row-major with rows along y from y = 0, NaN where masked
        CoverageMode mode = CoverageMode::NoWindow;

        double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
        Point3 cell_center(std::size_t ix, std::size_t iy) const
        {
            return {(double(ix) + 0.5) * cell_m, (double(iy) + 0.5) * cell_m, 0.0};
        }

        // Power average (linear) over unmasked cells whose centers lie in the square, in dB
        double zone_average_db(const Point3 &center, double side) const
        {
            double acc = 0.0;
            std::size_t n = 0;
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t ix = 0; ix < nx; ++ix)
                {
                    const Point3 c = cell_center(ix, iy);
                    const double v = at(ix, iy);
                    if (std::isnan(v) || std::abs(c.x - center.x) > side / 2.0 || std::abs(c.y - center.y) > side / 2.0)
                        continue;
                    acc += from_db(v);
                    ++n;
                }
            if (n == 0)
                throw InvalidParameter("zone holds no grid cells");
            return to_db(acc / double(n));
        }

        void write_raster(std::ostream &os) const
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%zu %zu %.9g %.2f\n", nx, ny, cell_m, reference_db);
            os << buf;
            for (std::size_t iy = 0; iy < ny; ++iy)
            {
                for (std::size_t ix = 0; ix < nx; ++ix)
                {
                    const double v = at(ix, iy);
                    if (std::isnan(v))
                        os << (ix ? " NaN" : "NaN");
                    else
                    {
                        std::snprintf(buf, sizeof buf, ix ? " %.2f" : "%.2f", v);
                        os << buf;
                    }
                }
                os << '\n';
            }
        }
    };

    // Knife-edge baseline per unit aperture in dB, capped at the shadow-boundary value
    inline double diffraction_baseline_db(const RoomScene &scene, const Point3 &cell)
    {
        const double r = std::hypot(cell.x, cell.y), theta = std::atan2(cell.y, cell.x);
        return std::min(to_db(gain_indoor_no_star(scene, theta, r, 1.0, scene.params)), scene.diffraction_cap_db);
    }

    namespace detail
    {
        // Sheet samples across a rectangle of the surface plane (surface frame)
        struct Sheet
        {
            std::vector<Point3> points;
            double cell_area = 0.0;
        };

        inline Sheet sample_sheet(const Point3 &center, double wx, double wy, const SignalParams &params, double density)
        {
            const auto nx = std::size_t(std::max(1.0, std::ceil(wx * density / params.wavelength_m - 1e-9)));
            const auto ny = std::size_t(std::max(1.0, std::ceil(wy * density / params.wavelength_m - 1e-9)));
            Sheet s;
            s.cell_area = wx * wy / double(nx * ny);
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j)
                    s.points.push_back({center.x - wx / 2.0 + (double(i) + 0.5) * wx / double(nx),
                                        center.y - wy / 2.0 + (double(j) + 0.5) * wy / double(ny), center.z});
            return s;
        }

        // |sum_s dA G(r, s) J(s)|^2 for sheet currents J
        inline double sheet_power(const SignalParams &params, const Sheet &sheet, const std::vector<cplx> &current, const Point3 &r)
        {
            cplx e = 0.0;
            for (std::size_t i = 0; i < sheet.points.size(); ++i)
                e += green_yy(params, r, sheet.points[i]) * current[i];
            return std::norm(e * sheet.cell_area);
        }
    } // namespace detail

    // Relative power of the focused tiles after the strategy split
    inline std::vector<double> coverage_tile_weights(const std::optional<StrategyConfig> &strategy,
                                                     const std::vector<double> &tile_to_focus)
    {
        const std::size_t n = tile_to_focus.size();
        std::vector<double> w(n, 1.0);
        if (!strategy)
            return w;
        if (strategy->kind == Strategy::PS)
            return std::vector<double>(n, 0.5);
        if (strategy->kind == Strategy::REG)
            return std::vector<double>(n, 0.25);
        // SEG keeps the half of the tiles nearest to the focus at full power
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t(0));
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return tile_to_focus[a] < tile_to_focus[b]; });
        for (std::size_t i = 0; i < n; ++i)
            w[order[i]] = i < (n + 1) / 2 ? 1.0 : 0.0;
        return w;
    }

    namespace detail
    {
        struct SheetSource
        {
            Sheet sheet;
            std::vector<cplx> current;
            double weight = 1.0;
        };

        // Surface tiles focused on one point (surface frame) with the strategy power split
        inline std::vector<SheetSource> focused_sources(const RoomScene &scene, const std::optional<StrategyConfig> &strategy,
                                                        const Point3 &focus, double j0)
        {
            const SignalParams &params = scene.params;
            const TilePartition part = partition_tiles(params, scene.star_box(), scene.receiver_box(focus), focus);
            std::vector<double> tile_dist;
            for (const Tile &t : part.tiles)
                tile_dist.push_back(t.distance_m);
            const std::vector<double> weights = coverage_tile_weights(strategy, tile_dist);
            std::vector<SheetSource> out;
            for (std::size_t t = 0; t < part.size(); ++t)
            {
                if (weights[t] <= 0.0)
                    continue;
                const Tile &tile = part.tiles[t];
                const Point3 c{tile.box.center.x, tile.box.center.y, 0.0};
                SheetSource s;
                s.sheet = sample_sheet(c, tile.box.extent_x, tile.box.extent_y, params, scene.samples_per_wavelength);
                const LocalFrame frame(c, focus);
                const double r = distance(c, focus);
                for (const Point3 &p : s.sheet.points)
                    s.current.push_back(j0 * focusing_phase(params, frame.to_local(p), r));
                s.weight = weights[t];
                out.push_back(std::move(s));
            }
            return out;
        }

        inline double sources_power(const SignalParams &params, const std::vector<SheetSource> &sources, const Point3 &r)
        {
            double p = 0.0;
            for (const SheetSource &s : sources)
                p += s.weight * sheet_power(params, s.sheet, s.current, r);
            return p;
        }
    } // namespace detail

    // Received power over the room. In StarRis mode the surface is focused on the configured focus point;
    // cells inside the focus zone are themselves served targets and receive their own focused beam.
    inline CoverageGrid coverage_grid(const RoomScene &scene, CoverageMode mode, const std::optional<StrategyConfig> &strategy,
                                      double resolution)
    {
        scene.validate();
        if (!(resolution >= 10.0))
            throw InvalidParameter("coverage resolution must be at least 10 points per metre");
        const SignalParams &params = scene.params;
        CoverageGrid g;
        g.resolution = resolution;
        g.mode = mode;
        g.nx = std::size_t(std::llround(scene.room_x_m * resolution));
        g.ny = std::size_t(std::llround(scene.room_y_m * resolution));
        g.cell_m = 1.0 / resolution;
        g.values.assign(g.nx * g.ny, std::numeric_limits<double>::quiet_NaN());

        // Unit plane-wave illumination: uniform sheet currents reproduce the Kirchhoff boresight level A / (lambda r)
        const double j0 = 4.0 * pi / (params.wavelength_m * std::abs(params.beta));

        std::vector<detail::SheetSource> sources;
        if (mode == CoverageMode::OpenWindow)
        {
            detail::SheetSource s;
            s.sheet = detail::sample_sheet({0.0, 0.0, 0.0}, scene.window_width_m, scene.window_height_m, params,
                                           scene.samples_per_wavelength);
            s.current.assign(s.sheet.points.size(), cplx(j0, 0.0));
            sources.push_back(std::move(s));
        }
        else if (mode == CoverageMode::StarRis)
            sources = detail::focused_sources(scene, strategy, scene.to_surface(scene.focus), j0);

        for (std::size_t iy = 0; iy < g.ny; ++iy)
            for (std::size_t ix = 0; ix < g.nx; ++ix)
            {
                const Point3 c = g.cell_center(ix, iy);
                if (std::atan2(c.y, c.x) < scene.guard_angle)
                    continue;
                const Point3 rs = scene.to_surface(c);
                double p = from_db(diffraction_baseline_db(scene, c));
                const bool in_zone = std::abs(c.x - scene.focus.x) <= scene.zone_side_m / 2.0 &&
                                     std::abs(c.y - scene.focus.y) <= scene.zone_side_m / 2.0;
                if (mode == CoverageMode::StarRis && in_zone)
                    p += detail::sources_power(params, detail::focused_sources(scene, strategy, rs, j0), rs);
                else
                    p += detail::sources_power(params, sources, rs);
                g.values[iy * g.nx + ix] = to_db(p);
            }
        return g;
    }

    // ------------------------------------------------------------------------------------------------
    // Angle sweep with and without the surface

    struct AngleSweepRow
    {
        double theta = 0.0; // [rad], shared by both users
        double gain_f_no_star = 0.0;
        double gain_n_no_star = 0.0;
        double gain_f_ps = 0.0;
        double gain_n_ps = 0.0;
    };

    inline std::vector<AngleSweepRow> angle_sweep(const RoomScene &scene, const std::vector<double> &angles)
    {
        std::vector<AngleSweepRow> rows;
        const StrategyConfig ps{Strategy::PS, {}, 0};
        for (double th : angles)
        {
            if (!(th > 0.0 && th < pi / 2.0))
                throw InvalidParameter("sweep angles must lie in (0, 90) degrees");
            const RoomScene s = scene.with_angles(th, th);
            AngleSweepRow row;
            row.theta = th;
            row.gain_f_no_star = gain_outdoor_no_star(s, th, s.user_f.norm(), s.user_aperture_m2);
            row.gain_n_no_star = gain_indoor_no_star(s, th, s.user_n.norm(), s.user_aperture_m2, s.params);
            row.gain_f_ps = gain_with_star(s, ps, HybridTarget::F);
            row.gain_n_ps = gain_with_star(s, ps, HybridTarget::N);
            rows.push_back(row);
        }
        return rows;
    }

} // namespace starris

#endif
