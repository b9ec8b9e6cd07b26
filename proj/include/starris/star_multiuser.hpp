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

#ifndef STARRIS_STAR_MULTIUSER_HPP
#define STARRIS_STAR_MULTIUSER_HPP

#include "core_em.hpp"
#include "gain_single.hpp"
#include "quadrature.hpp"
#include "regions.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace starris
{
    enum class Side
    {
        Transmission, // z above the surface plane
        Reflection    // z below the surface plane
    };

    struct UserSpec
    {
        Point3 position;
        BoxVolume receive_volume;
        Side side = Side::Transmission;

        // Receiver box centered at the position; the side follows from the sign of z - surface_z
        static UserSpec at(const Point3 &position, double ex, double ey, double ez, double surface_z = 0.0)
        {
            if (position.z == surface_z)
                throw InvalidParameter("user lies in the surface plane");
            return {position, BoxVolume(position, ex, ey, ez), position.z > surface_z ? Side::Transmission : Side::Reflection};
        }

        void validate(double surface_z = 0.0) const
        {
            if (distance(receive_volume.center, position) > 1e-12 * (1.0 + position.norm()))
                throw InvalidParameter("receive volume must be centered at the user position");
            const bool above = position.z > surface_z;
            if ((side == Side::Transmission) != above || position.z == surface_z)
                throw InvalidParameter("user side does not match its position");
        }
    };

    // Element grid of a surface with per-element operating mode and optional cluster labels
    struct RisLayout
    {
        std::vector<BoxVolume> elements;
        std::vector<RisType> modes;
        std::vector<std::size_t> clusters; // Optional explicit tiles, empty for automatic tiling

        std::size_t size() const { return elements.size(); }
        double element_volume() const { return elements.front().volume(); }
        double element_width_z() const { return elements.front().extent_z; }

        static RisLayout grid(const Point3 &center, std::size_t nx, std::size_t ny, double sx, double sy,
                              double thickness, RisType mode = RisType::Star)
        {
            if (nx == 0 || ny == 0)
                throw InvalidParameter("layout needs at least one element");
            RisLayout l;
            const double x0 = center.x - sx * double(nx) / 2.0, y0 = center.y - sy * double(ny) / 2.0;
            for (std::size_t i = 0; i < nx; ++i)
                for (std::size_t j = 0; j < ny; ++j)
                    l.elements.emplace_back(Point3{x0 + (double(i) + 0.5) * sx, y0 + (double(j) + 0.5) * sy, center.z},
                                            sx, sy, thickness);
            l.modes.assign(l.elements.size(), mode);
            return l;
        }

        // Smallest box holding the selected elements (all when empty)
        BoxVolume bounding_box(const std::vector<std::size_t> &subset = {}) const
        {
            if (elements.empty())
                throw InvalidParameter("empty layout");
            Point3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
            auto grow = [&](const BoxVolume &b)
            {
                const Point3 a = b.lower(), c = b.upper();
                lo = {std::min(lo.x, a.x), std::min(lo.y, a.y), std::min(lo.z, a.z)};
                hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
            };
            if (subset.empty())
                for (const auto &e : elements)
                    grow(e);
            else
                for (std::size_t i : subset)
                    grow(elements.at(i));
            return BoxVolume((lo + hi) * 0.5, hi.x - lo.x, hi.y - lo.y, hi.z - lo.z);
        }

        void validate() const
        {
            if (elements.empty())
                throw InvalidParameter("empty layout");
            if (modes.size() != elements.size())
                throw InvalidParameter("one mode per element is required");
            if (!clusters.empty() && clusters.size() != elements.size())
                throw InvalidParameter("one cluster label per element is required");
        }
    };

    enum class Strategy
    {
        PS,
        SEG,
        REG
    };

    inline std::string_view to_string(Strategy s)
    {
        return s == Strategy::PS ? "PS" : s == Strategy::SEG ? "SEG" : "REG";
    }

    struct StrategyConfig
    {
        Strategy kind = Strategy::PS;
        std::vector<std::size_t> grouping; // Element to user label (SEG and REG)
        std::uint64_t rng_seed = 0;
    };

    struct GainReport
    {
        std::vector<double> per_user_gain;
        std::vector<double> per_user_gain_db;
        double sum_rate_bps_hz = 0.0;
    };

    // Angle between the directions from an element center to two users
    inline double angle_between_users(const Point3 &element_center, const Point3 &user_p, const Point3 &user_q)
    {
        const Point3 a = user_p - element_center, b = user_q - element_center;
        const double na = a.norm(), nb = b.norm();
        if (!(na > 0.0) || !(nb > 0.0))
            throw DegenerateFrame("user coincides with the element center");
        const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
        return std::acos(c);
    }

    // Unnormalized sinc, sin(x) / x
    inline double sinc(double x)
    {
        return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    }

    inline double xi_factor(const SignalParams &params, double alpha, double element_width_z)
    {
        if (!(element_width_z > 0.0))
            throw InvalidParameter("element width must be positive");
        return pi * (1.0 - std::cos(alpha)) * element_width_z / params.wavelength_m;
    }

    // Normalization A_m = (1/V_m) integral |sum_p F_p|^2 dV over one element
    inline double ps_normalization(const SignalParams &params, const BoxVolume &element, const std::vector<UserSpec> &users,
                                   double samples_per_wavelength = 8.0)
    {
        QuadratureGrid g = QuadratureGrid::with_density(element, params, samples_per_wavelength);
        if (g.nx < 2 || g.ny < 2 || g.nz < 2)
            g = QuadratureGrid::uniform(element, std::max<std::size_t>(g.nx, 2), std::max<std::size_t>(g.ny, 2),
                                        std::max<std::size_t>(g.nz, 2));
        std::vector<LocalFrame> frames;
        std::vector<double> ranges;
        for (const auto &u : users)
        {
            frames.emplace_back(element.center, u.position);
            ranges.push_back(distance(element.center, u.position));
        }
        double acc = 0.0;
        for (std::size_t s = 0; s < g.size(); ++s)
        {
            cplx f = 0.0;
            for (std::size_t p = 0; p < users.size(); ++p)
                f += focusing_phase(params, frames[p].to_local(g.points[s]), ranges[p]);
            acc += g.weights[s] * std::norm(f);
        }
        return acc / element.volume();
    }

    namespace detail
    {
        inline void check_users(const RisLayout &layout, const std::vector<UserSpec> &users, std::size_t target)
        {
            layout.validate();
            if (users.empty() || target >= users.size())
                throw InvalidParameter("target user index out of range");
            const BoxVolume box = layout.bounding_box();
            for (std::size_t p = 0; p < users.size(); ++p)
            {
                if (box.contains(users[p].position))
                    throw SingularPoint("user lies inside the surface volume");
                for (std::size_t q = p + 1; q < users.size(); ++q)
                    if (users[p].position == users[q].position)
                        throw InvalidParameter("users must be distinct");
            }
        }

        inline void check_grouping(const std::vector<std::size_t> &grouping, std::size_t elements, std::size_t users)
        {
            if (grouping.size() != elements)
                throw InvalidGrouping("grouping must label every element exactly once");
            for (std::size_t g : grouping)
                if (g >= users)
                    throw InvalidGrouping("grouping refers to an unknown user");
        }

        // Group of elements sharing one focusing frame
        struct ElementTile
        {
            std::vector<std::size_t> members;
            Point3 centroid;
        };

        inline void finish_tiles(const RisLayout &layout, std::vector<ElementTile> &tiles)
        {
            std::erase_if(tiles, [](const ElementTile &t)
                          { return t.members.empty(); });
            for (auto &t : tiles)
            {
                Point3 c;
                for (std::size_t m : t.members)
                    c = c + layout.elements[m].center;
                t.centroid = c / double(t.members.size());
            }
        }

        // Elements of a subset split into tiles that are far field for the given user
        inline std::vector<ElementTile> tile_elements(const SignalParams &params, const RisLayout &layout,
                                                      const std::vector<std::size_t> &subset, const UserSpec &user,
                                                      const TilingOptions &opt)
        {
            std::vector<ElementTile> tiles;
            if (subset.empty())
                return tiles;
            if (!layout.clusters.empty())
            {
                const std::size_t n = *std::max_element(layout.clusters.begin(), layout.clusters.end()) + 1;
                tiles.resize(n);
                for (std::size_t m : subset)
                    tiles[layout.clusters[m]].members.push_back(m);
            }
            else
            {
                const BoxVolume box = layout.bounding_box(subset);
                const TilePartition part = partition_tiles(params, box, user.receive_volume, user.position, opt);
                tiles.resize(part.size());
                for (std::size_t m : subset)
                    tiles[part.tile_index(layout.elements[m].center)].members.push_back(m);
            }
            finish_tiles(layout, tiles);
            return tiles;
        }

        inline double path_term(const UserSpec &u, double element_volume, const Point3 &at)
        {
            const double s = 4.0 * pi * distance(at, u.position);
            return u.receive_volume.volume() * element_volume / (s * s);
        }
    } // namespace detail

    // Power-splitting gain of user q, one incoherent term per element
    inline double gain_ps(const SignalParams &params, const LinkBudget &budget, const RisLayout &layout,
                          const std::vector<UserSpec> &users, std::size_t q, double samples_per_wavelength = 8.0)
    {
        detail::check_users(layout, users, q);
        double sum = 0.0;
        for (const BoxVolume &e : layout.elements)
        {
            double coh = 1.0;
            for (std::size_t p = 0; p < users.size(); ++p)
                if (p != q)
                    coh += sinc(xi_factor(params, angle_between_users(e.center, users[p].position, users[q].position), e.extent_z));
            const double a_m = users.size() == 1 ? 1.0 : ps_normalization(params, e, users, samples_per_wavelength);
            sum += detail::path_term(users[q], e.volume(), e.center) * coh * coh / a_m;
        }
        return budget.friis_factor() * params.beta_sq() * sum;
    }

    namespace detail
    {
        // Per-tile coherent sum of own and foreign-group currents over the far-field tiles seen from p
        inline double grouped_gain(const SignalParams &params, const LinkBudget &budget, const RisLayout &layout,
                                   const std::vector<UserSpec> &users, const std::vector<std::size_t> &grouping,
                                   std::size_t p, const TilingOptions &opt)
        {
            check_users(layout, users, p);
            check_grouping(grouping, layout.size(), users.size());
            std::vector<std::size_t> all(layout.size());
            std::iota(all.begin(), all.end(), std::size_t(0));
            const double dz = layout.element_width_z();
            double sum = 0.0;
            for (const auto &tile : tile_elements(params, layout, all, users[p], opt))
            {
                std::vector<double> count(users.size(), 0.0);
                for (std::size_t m : tile.members)
                    count[grouping[m]] += 1.0;
                double amp = count[p];
                for (std::size_t q = 0; q < users.size(); ++q)
                    if (q != p && count[q] > 0.0)
                        amp += count[q] * sinc(xi_factor(params, angle_between_users(tile.centroid, users[p].position, users[q].position), dz));
                sum += path_term(users[p], layout.element_volume(), tile.centroid) * amp * amp;
            }
            return budget.friis_factor() * params.beta_sq() * sum;
        }
    } // namespace detail

    // Random-grouping gain of user p, coherent within every far-field tile
    inline double gain_reg(const SignalParams &params, const LinkBudget &budget, const RisLayout &layout,
                           const std::vector<UserSpec> &users, const std::vector<std::size_t> &grouping, std::size_t p,
                           const TilingOptions &opt = {})
    {
        return detail::grouped_gain(params, budget, layout, users, grouping, p, opt);
    }

    // Selective-grouping gain of user p. Every far-field tile seen from p is split into its group parts:
    // the part owned by p contributes M_i^2, a part owned by another user (M_i sinc)^2, each at its own centroid.
    inline double gain_seg(const SignalParams &params, const LinkBudget &budget, const RisLayout &layout,
                           const std::vector<UserSpec> &users, const std::vector<std::size_t> &grouping, std::size_t p,
                           const TilingOptions &opt = {})
    {
        detail::check_users(layout, users, p);
        detail::check_grouping(grouping, layout.size(), users.size());
        std::vector<std::size_t> all(layout.size());
        std::iota(all.begin(), all.end(), std::size_t(0));
        const double dz = layout.element_width_z();
        double sum = 0.0;
        for (const auto &tile : detail::tile_elements(params, layout, all, users[p], opt))
        {
            std::vector<double> count(users.size(), 0.0);
            std::vector<Point3> centroid(users.size());
            for (std::size_t m : tile.members)
            {
                count[grouping[m]] += 1.0;
                centroid[grouping[m]] = centroid[grouping[m]] + layout.elements[m].center;
            }
            for (std::size_t g = 0; g < users.size(); ++g)
            {
                if (count[g] == 0.0)
                    continue;
                const Point3 c = centroid[g] / count[g];
                double amp = count[g];
                if (g != p)
                    amp *= sinc(xi_factor(params, angle_between_users(c, users[p].position, users[g].position), dz));
                sum += detail::path_term(users[p], layout.element_volume(), c) * amp * amp;
            }
        }
        return budget.friis_factor() * params.beta_sq() * sum;
    }

    // Balanced element grouping: nearest elements first for SEG, seeded shuffle for REG
    inline std::vector<std::size_t> make_grouping(Strategy kind, const RisLayout &layout, const std::vector<UserSpec> &users,
                                                  std::uint64_t seed = 0)
    {
        const std::size_t m_total = layout.size(), u_total = users.size();
        if (u_total == 0 || m_total < u_total)
            throw InvalidParameter("grouping needs at least as many elements as users");
        if (kind == Strategy::PS)
            throw InvalidParameter("power splitting has no grouping");
        std::vector<std::size_t> label(m_total, 0);
        if (u_total == 1)
            return label;
        const std::size_t base = m_total / u_total, extra = m_total % u_total;

        if (kind == Strategy::REG)
        {
            for (std::size_t m = 0; m < m_total; ++m)
                label[m] = m % u_total;
            std::mt19937_64 rng(seed);
            for (std::size_t i = m_total - 1; i > 0; --i)
                std::swap(label[i], label[std::size_t(rng() % (i + 1))]);
            return label;
        }

        struct Pair
        {
            double d;
            std::size_t m, u;
        };
        std::vector<Pair> pairs;
        pairs.reserve(m_total * u_total);
        for (std::size_t m = 0; m < m_total; ++m)
            for (std::size_t u = 0; u < u_total; ++u)
                pairs.push_back({distance(layout.elements[m].center, users[u].position), m, u});
        std::sort(pairs.begin(), pairs.end(), [](const Pair &a, const Pair &b)
                  { return a.d != b.d ? a.d < b.d : a.m != b.m ? a.m < b.m : a.u < b.u; });

        std::vector<std::size_t> size(u_total, 0);
        std::vector<bool> done(m_total, false);
        std::size_t extras_used = 0;
        auto accepts = [&](std::size_t u)
        { return size[u] < base || (size[u] == base && extras_used < extra); };
        for (std::size_t i = 0; i < pairs.size(); ++i)
        {
            const std::size_t m = pairs[i].m;
            if (done[m])
                continue;
            // Equidistant users compete for the element: the smaller group wins
            std::size_t best = u_total;
            for (std::size_t j = i; j < pairs.size() && pairs[j].m == m && pairs[j].d <= pairs[i].d * (1.0 + 1e-12); ++j)
                if (accepts(pairs[j].u) && (best == u_total || size[pairs[j].u] < size[best]))
                    best = pairs[j].u;
            if (best == u_total)
                continue;
            if (size[best] == base)
                ++extras_used;
            ++size[best];
            label[m] = best;
            done[m] = true;
        }
        return label;
    }

    // Shannon sum rate over all users
    inline double sum_rate(const std::vector<double> &gains, double tx_power_w, double noise_w)
    {
        if (!(noise_w > 0.0) || !(tx_power_w > 0.0))
            throw InvalidParameter("powers must be positive");
        double r = 0.0;
        for (double g : gains)
            r += std::log2(1.0 + g * tx_power_w / noise_w);
        return r;
    }

    inline GainReport evaluate_strategy(const SignalParams &params, const LinkBudget &budget, const RisLayout &layout,
                                        const std::vector<UserSpec> &users, const StrategyConfig &strategy,
                                        double tx_power_w, double noise_w, const TilingOptions &opt = {})
    {
        GainReport rep;
        std::vector<std::size_t> grouping = strategy.grouping;
        if (strategy.kind != Strategy::PS && grouping.empty())
            grouping = make_grouping(strategy.kind, layout, users, strategy.rng_seed);
        for (std::size_t u = 0; u < users.size(); ++u)
        {
            double g = 0.0;
            switch (strategy.kind)
            {
            case Strategy::PS:
                g = gain_ps(params, budget, layout, users, u);
                break;
            case Strategy::REG:
                g = gain_reg(params, budget, layout, users, grouping, u, opt);
                break;
            case Strategy::SEG:
                g = gain_seg(params, budget, layout, users, grouping, u, opt);
                break;
            }
            rep.per_user_gain.push_back(g);
            rep.per_user_gain_db.push_back(to_db(g));
        }
        rep.sum_rate_bps_hz = sum_rate(rep.per_user_gain, tx_power_w, noise_w);
        return rep;
    }

} // namespace starris

#endif
