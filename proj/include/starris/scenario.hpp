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

#ifndef STARRIS_SCENARIO_HPP
#define STARRIS_SCENARIO_HPP

// Scenario files (YAML with mandatory unit suffixes) and the experiment runners behind the command-line tool.
// Requires yaml-cpp.

#include "core_em.hpp"
#include "errors.hpp"
#include "gain_single.hpp"
#include "hybrid_scenario.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "regions.hpp"
#include "star_multiuser.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace starris::scenario
{
    inline constexpr std::string_view version = "1.0.0";

    enum class Experiment
    {
        BoundaryTable,
        ScalingSweep,
        GainVsDistance,
        MultiuserSumrate,
        HybridCoverage,
        HybridAngleSweep
    };

    struct ExperimentInfo
    {
        Experiment kind;
        std::string_view name;
        std::string_view summary;
    };

    inline constexpr std::array<ExperimentInfo, 6> experiments{{
        {Experiment::BoundaryTable, "boundary-table", "near-field/far-field boundary r_b for rows of surface and receiver sizes"},
        {Experiment::ScalingSweep, "scaling-sweep", "received power against element count with far/near-field slope fits"},
        {Experiment::GainVsDistance, "gain-vs-distance", "field region, DoF and channel gain against distance, optional kernel oracle"},
        {Experiment::MultiuserSumrate, "multiuser-sumrate", "PS, REG and SEG per-user gains and sum rate against surface size"},
        {Experiment::HybridCoverage, "hybrid-coverage", "indoor coverage rasters without window, with open window and with STAR-RIS"},
        {Experiment::HybridAngleSweep, "hybrid-angle-sweep", "outdoor and indoor user gains with and without STAR-RIS against angle"},
    }};

    inline std::string_view to_string(Experiment e)
    {
        for (const auto &x : experiments)
            if (x.kind == e)
                return x.name;
        return "unknown";
    }

    // ------------------------------------------------------------------------------------------------
    // Validation issues

    struct Issue
    {
        std::string kind; // MissingField, UnitError, RangeError or InvalidValue
        std::string field;
        int line = 0; // 1-based, 0 if unknown
        std::string message;

        std::string text() const
        {
            std::string s = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
            return s + kind + " in '" + field + "': " + message;
        }
    };

    class ValidationFailure : public error
    {
    public:
        explicit ValidationFailure(std::vector<Issue> issues) : error(join(issues)), issues_(std::move(issues)) {}
        const std::vector<Issue> &issues() const { return issues_; }

    private:
        static std::string join(const std::vector<Issue> &v)
        {
            std::string s;
            for (const auto &i : v)
                s += (s.empty() ? "" : "\n") + i.text();
            return s;
        }
        std::vector<Issue> issues_;
    };

    // Module error raised while running, annotated with the scenario line that configured the failing step
    class RuntimeFailure : public error
    {
    public:
        using error::error;
    };

    // ------------------------------------------------------------------------------------------------
    // Quantities

    enum class Dim
    {
        Length,
        Frequency,
        Angle,
        Power,
        Ratio,   // dB
        Area,
        Density, // per metre
        Beta,    // ohm per metre
        Count    // plain number, no unit
    };

    inline std::string_view dim_units(Dim d)
    {
        switch (d)
        {
        case Dim::Length:
            return "m, cm, mm, um, nm, km";
        case Dim::Frequency:
            return "Hz, kHz, MHz, GHz, THz";
        case Dim::Angle:
            return "deg, rad";
        case Dim::Power:
            return "W, mW, uW, nW, pW, fW, dBW, dBm";
        case Dim::Ratio:
            return "dB";
        case Dim::Area:
            return "m2, cm2, mm2";
        case Dim::Density:
            return "/m";
        case Dim::Beta:
            return "ohm/m";
        default:
            return "none";
        }
    }

    // Converts "<number> <unit>" to SI; returns nullopt with a reason on failure
    inline std::optional<double> parse_quantity(std::string_view text, Dim dim, std::string &why)
    {
        const std::string s(text);
        const char *begin = s.c_str();
        char *end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
        {
            why = "expected a number";
            return std::nullopt;
        }
        std::string unit(end);
        unit.erase(0, unit.find_first_not_of(" \t"));
        unit.erase(unit.find_last_not_of(" \t") + 1);
        if (!std::isfinite(v))
        {
            why = "value must be finite";
            return std::nullopt;
        }
        if (dim == Dim::Count)
        {
            if (!unit.empty())
            {
                why = "plain number expected, found unit '" + unit + "'";
                return std::nullopt;
            }
            return v;
        }
        if (unit.empty())
        {
            why = "missing unit suffix (one of " + std::string(dim_units(dim)) + ")";
            return std::nullopt;
        }
        struct U
        {
            Dim d;
            std::string_view name;
            double scale;
        };
        static constexpr U table[] = {
            {Dim::Length, "m", 1.0}, {Dim::Length, "cm", 1e-2}, {Dim::Length, "mm", 1e-3}, {Dim::Length, "um", 1e-6},
            {Dim::Length, "nm", 1e-9}, {Dim::Length, "km", 1e3},
            {Dim::Frequency, "Hz", 1.0}, {Dim::Frequency, "kHz", 1e3}, {Dim::Frequency, "MHz", 1e6},
            {Dim::Frequency, "GHz", 1e9}, {Dim::Frequency, "THz", 1e12},
            {Dim::Angle, "deg", pi / 180.0}, {Dim::Angle, "rad", 1.0},
            {Dim::Power, "W", 1.0}, {Dim::Power, "mW", 1e-3}, {Dim::Power, "uW", 1e-6}, {Dim::Power, "nW", 1e-9},
            {Dim::Power, "pW", 1e-12}, {Dim::Power, "fW", 1e-15},
            {Dim::Ratio, "dB", 1.0},
            {Dim::Area, "m2", 1.0}, {Dim::Area, "m^2", 1.0}, {Dim::Area, "cm2", 1e-4}, {Dim::Area, "cm^2", 1e-4},
            {Dim::Area, "mm2", 1e-6}, {Dim::Area, "mm^2", 1e-6},
            {Dim::Density, "/m", 1.0}, {Dim::Density, "per m", 1.0},
            {Dim::Beta, "ohm/m", 1.0}, {Dim::Beta, "Ohm/m", 1.0},
        };
        if (dim == Dim::Power && (unit == "dBW" || unit == "dBm"))
            return from_db(v) * (unit == "dBm" ? 1e-3 : 1.0);
        for (const auto &u : table)
            if (u.d == dim && u.name == unit)
                return v * u.scale;
        why = "unknown unit '" + unit + "' (expected one of " + std::string(dim_units(dim)) + ")";
        return std::nullopt;
    }

    // ------------------------------------------------------------------------------------------------
    // Configuration

    struct SweepAxis
    {
        std::string variable;
        double from = 0.0, to = 0.0;
        std::size_t steps = 1;
        int line = 0;

        std::vector<double> values() const
        {
            std::vector<double> v;
            for (std::size_t i = 0; i < steps; ++i)
                v.push_back(steps == 1 ? from : from + (to - from) * double(i) / double(steps - 1));
            return v;
        }
    };

    struct BoundaryRow
    {
        std::string label;
        double wavelength_m = 0.0;
        double ris_size_m = 0.0;
        double receiver_size_m = 0.0;
        int line = 0;
    };

    struct UserEntry
    {
        Point3 position;
        std::array<double, 3> receiver{0.01, 0.01, 0.01};
        int line = 0;
    };

    struct ScenarioConfig
    {
        Experiment kind = Experiment::BoundaryTable;
        std::string name;
        int line = 0;

        std::optional<double> wavelength_m;
        std::optional<double> beta_magnitude;
        double samples_per_wavelength = default_samples_per_wavelength;
        std::uint64_t seed = 0;
        LinkBudget budget{1.0, 10.0, 0.01};
        std::optional<SweepAxis> sweep;

        std::vector<BoundaryRow> rows; // boundary-table

        double element_side_m = 0.1;       // scaling-sweep
        double element_thickness_m = 0.0025;
        std::array<double, 3> receiver_size{0.03, 0.03, 0.01};
        double receiver_distance_m = 0.7;

        std::array<double, 3> surface_size{0.04, 0.04, 0.0025}; // gain-vs-distance
        bool kernel_oracle = false;
        double dof_threshold = 0.01;
        int kernel_line = 0;

        std::array<double, 3> element_size{0.01, 0.01, 0.005}; // multiuser-sumrate
        std::vector<UserEntry> users;
        std::vector<Strategy> strategies{Strategy::PS, Strategy::REG, Strategy::SEG};
        std::size_t reg_trials = 1;
        double tx_power_w = 1.0;
        std::optional<double> noise_power_w; // Calibrated from the peak gain when absent
        double peak_snr_db = 25.0;

        RoomScene scene; // hybrid-*
        double resolution = 20.0;
        std::vector<CoverageMode> modes{CoverageMode::NoWindow, CoverageMode::OpenWindow, CoverageMode::StarRis};
        std::optional<Strategy> coverage_strategy;

        SignalParams signal() const
        {
            if (!wavelength_m)
                throw MissingField("signal: frequency or wavelength is required");
            return SignalParams::from_wavelength(*wavelength_m, beta_magnitude);
        }
    };

    namespace detail
    {
        enum class Range
        {
            Any,
            Positive,
            NonNegative
        };

        class Reader
        {
        public:
            std::vector<Issue> issues;

            static int line_of(const YAML::Node &n) { return n.IsDefined() && !n.IsNull() ? n.Mark().line + 1 : 0; }

            void add(std::string kind, std::string field, int line, std::string msg)
            {
                issues.push_back({std::move(kind), std::move(field), line, std::move(msg)});
            }

            bool require_map(const YAML::Node &n, const std::string &field, int parent_line)
            {
                if (!n.IsDefined() || n.IsNull())
                {
                    add("MissingField", field, parent_line, "section is required");
                    return false;
                }
                if (!n.IsMap())
                {
                    add("InvalidValue", field, line_of(n), "expected a mapping");
                    return false;
                }
                return true;
            }

            std::optional<double> scalar(const YAML::Node &n, const std::string &field, Dim dim, Range range)
            {
                if (!n.IsScalar())
                {
                    add("InvalidValue", field, line_of(n), "expected a scalar value");
                    return std::nullopt;
                }
                std::string why;
                const auto v = parse_quantity(n.Scalar(), dim, why);
                if (!v)
                {
                    add("UnitError", field, line_of(n), why);
                    return std::nullopt;
                }
                if ((range == Range::Positive && !(*v > 0.0)) || (range == Range::NonNegative && !(*v >= 0.0)))
                {
                    add("RangeError", field, line_of(n), range == Range::Positive ? "must be positive" : "must not be negative");
                    return std::nullopt;
                }
                return v;
            }

            std::optional<double> quantity(const YAML::Node &parent, const std::string &key, const std::string &path, Dim dim,
                                           Range range, bool required)
            {
                const YAML::Node n = parent[key];
                if (!n.IsDefined() || n.IsNull())
                {
                    if (required)
                        add("MissingField", path, line_of(parent), "value is required");
                    return std::nullopt;
                }
                return scalar(n, path, dim, range);
            }

            template <std::size_t N>
            std::optional<std::array<double, N>> vector(const YAML::Node &parent, const std::string &key, const std::string &path,
                                                        Dim dim, Range range, bool required)
            {
                const YAML::Node n = parent[key];
                if (!n.IsDefined() || n.IsNull())
                {
                    if (required)
                        add("MissingField", path, line_of(parent), "value is required");
                    return std::nullopt;
                }
                if (!n.IsSequence() || n.size() != N)
                {
                    add("InvalidValue", path, line_of(n), "expected a list of " + std::to_string(N) + " values");
                    return std::nullopt;
                }
                std::array<double, N> out{};
                bool ok = true;
                for (std::size_t i = 0; i < N; ++i)
                {
                    const auto v = scalar(n[i], path + "[" + std::to_string(i) + "]", dim, range);
                    ok = ok && v.has_value();
                    if (v)
                        out[i] = *v;
                }
                if (!ok)
                    return std::nullopt;
                return out;
            }

            std::optional<std::string> text(const YAML::Node &parent, const std::string &key, const std::string &path, bool required)
            {
                const YAML::Node n = parent[key];
                if (!n.IsDefined() || n.IsNull())
                {
                    if (required)
                        add("MissingField", path, line_of(parent), "value is required");
                    return std::nullopt;
                }
                if (!n.IsScalar())
                {
                    add("InvalidValue", path, line_of(n), "expected a scalar value");
                    return std::nullopt;
                }
                return n.Scalar();
            }

            std::optional<bool> flag(const YAML::Node &parent, const std::string &key, const std::string &path)
            {
                const auto t = text(parent, key, path, false);
                if (!t)
                    return std::nullopt;
                if (*t == "true" || *t == "yes" || *t == "on")
                    return true;
                if (*t == "false" || *t == "no" || *t == "off")
                    return false;
                add("InvalidValue", path, line_of(parent[key]), "expected true or false");
                return std::nullopt;
            }

            std::optional<std::size_t> count(const YAML::Node &parent, const std::string &key, const std::string &path,
                                             std::size_t minimum, bool required)
            {
                const auto v = quantity(parent, key, path, Dim::Count, Range::Any, required);
                if (!v)
                    return std::nullopt;
                if (*v != std::floor(*v) || *v < double(minimum))
                {
                    add("RangeError", path, line_of(parent[key]), "must be an integer of at least " + std::to_string(minimum));
                    return std::nullopt;
                }
                return std::size_t(*v);
            }
        };

        inline std::optional<Strategy> strategy_from(std::string_view s)
        {
            if (s == "PS")
                return Strategy::PS;
            if (s == "REG")
                return Strategy::REG;
            if (s == "SEG")
                return Strategy::SEG;
            return std::nullopt;
        }

        inline std::optional<CoverageMode> mode_from(std::string_view s)
        {
            for (CoverageMode m : {CoverageMode::NoWindow, CoverageMode::OpenWindow, CoverageMode::StarRis})
                if (to_string(m) == s)
                    return m;
            return std::nullopt;
        }

        inline void read_signal(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg, bool required)
        {
            const YAML::Node sig = root["signal"];
            if (!sig.IsDefined() || sig.IsNull())
            {
                if (required)
                    rd.add("MissingField", "signal", Reader::line_of(root), "section is required");
                return;
            }
            if (!rd.require_map(sig, "signal", Reader::line_of(root)))
                return;
            const auto f = rd.quantity(sig, "frequency", "signal.frequency", Dim::Frequency, Range::Positive, false);
            const auto w = rd.quantity(sig, "wavelength", "signal.wavelength", Dim::Length, Range::Positive, false);
            if (w)
                cfg.wavelength_m = w;
            else if (f)
                cfg.wavelength_m = speed_of_light / *f;
            else if (!sig["frequency"].IsDefined() && !sig["wavelength"].IsDefined())
                rd.add("MissingField", "signal.frequency", Reader::line_of(sig), "frequency or wavelength is required");
            if (f && w && std::abs(*f * *w / speed_of_light - 1.0) > 0.01)
                rd.add("RangeError", "signal.wavelength", Reader::line_of(sig["wavelength"]),
                       "frequency and wavelength disagree by more than 1%");
            if (const auto b = rd.quantity(sig, "beta_magnitude", "signal.beta_magnitude", Dim::Beta, Range::Positive, false))
                cfg.beta_magnitude = b;
        }

        inline void read_budget(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg)
        {
            const YAML::Node b = root["budget"];
            if (!b.IsDefined() || b.IsNull() || !rd.require_map(b, "budget", Reader::line_of(root)))
                return;
            if (const auto d = rd.quantity(b, "bs_directivity", "budget.bs_directivity", Dim::Ratio, Range::Any, false))
                cfg.budget.bs_directivity = from_db(*d);
            if (const auto d = rd.quantity(b, "bs_distance", "budget.bs_distance", Dim::Length, Range::Positive, false))
                cfg.budget.bs_distance_m = *d;
            if (const auto a = rd.quantity(b, "tx_aperture", "budget.tx_aperture", Dim::Area, Range::Positive, false))
                cfg.budget.tx_aperture_m2 = *a;
        }

        inline void read_sweep(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg, std::string_view variable, Dim dim)
        {
            const YAML::Node s = root["sweep"];
            if (variable.empty())
            {
                if (s.IsDefined() && !s.IsNull())
                    rd.add("InvalidValue", "sweep", Reader::line_of(s), "this experiment takes no sweep");
                return;
            }
            if (!rd.require_map(s, "sweep", Reader::line_of(root)))
                return;
            SweepAxis ax;
            ax.line = Reader::line_of(s);
            const auto var = rd.text(s, "variable", "sweep.variable", true);
            if (var && *var != variable)
                rd.add("InvalidValue", "sweep.variable", Reader::line_of(s["variable"]),
                       "this experiment sweeps '" + std::string(variable) + "'");
            ax.variable = std::string(variable);
            const Range range = dim == Dim::Angle ? Range::Any : Range::Positive;
            const auto from = rd.quantity(s, "from", "sweep.from", dim, range, true);
            const auto to = rd.quantity(s, "to", "sweep.to", dim, range, true);
            const auto steps = rd.quantity(s, "steps", "sweep.steps", Dim::Count, Range::Any, true);
            if (steps && (*steps < 1.0 || *steps != std::floor(*steps)))
                rd.add("RangeError", "sweep.steps", Reader::line_of(s["steps"]), "must be an integer of at least 1");
            else if (from && to && steps)
            {
                ax.from = *from, ax.to = *to, ax.steps = std::size_t(*steps);
                if (*to < *from)
                    rd.add("RangeError", "sweep.to", Reader::line_of(s["to"]), "must not be below sweep.from");
                if (dim == Dim::Count && (ax.from != std::floor(ax.from) || ax.to != std::floor(ax.to)))
                    rd.add("RangeError", "sweep.from", Reader::line_of(s["from"]), "element counts must be integers");
                cfg.sweep = ax;
            }
        }

        inline void read_scene(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg)
        {
            RoomScene &sc = cfg.scene;
            const YAML::Node n = root["scene"];
            if (n.IsDefined() && !n.IsNull() && rd.require_map(n, "scene", Reader::line_of(root)))
            {
                using R = Range;
                if (const auto v = rd.vector<2>(n, "room", "scene.room", Dim::Length, R::Positive, false))
                    sc.room_x_m = (*v)[0], sc.room_y_m = (*v)[1];
                if (const auto v = rd.quantity(n, "window_center", "scene.window_center", Dim::Length, R::Positive, false))
                    sc.window_center_y_m = *v;
                if (const auto v = rd.vector<2>(n, "window_size", "scene.window_size", Dim::Length, R::Positive, false))
                    sc.window_width_m = (*v)[0], sc.window_height_m = (*v)[1];
                if (const auto v = rd.quantity(n, "thickness", "scene.thickness", Dim::Length, R::Positive, false))
                    sc.star_thickness_m = *v;
                if (const auto v = rd.quantity(n, "element_size", "scene.element_size", Dim::Length, R::Positive, false))
                    sc.element_size_m = *v;
                if (const auto v = rd.quantity(n, "element_width", "scene.element_width", Dim::Length, R::Positive, false))
                    sc.element_width_m = *v;
                if (const auto v = rd.quantity(n, "user_aperture", "scene.user_aperture", Dim::Area, R::Positive, false))
                    sc.user_aperture_m2 = *v;
                if (const auto v = rd.quantity(n, "user_thickness", "scene.user_thickness", Dim::Length, R::Positive, false))
                    sc.user_thickness_m = *v;
                if (const auto v = rd.quantity(n, "bs_distance", "scene.bs_distance", Dim::Length, R::Positive, false))
                    sc.bs_distance_m = *v;
                if (const auto v = rd.quantity(n, "r_sn", "scene.r_sn", Dim::Length, R::Positive, false))
                    sc.r_sn_m = *v;
                if (const auto v = rd.quantity(n, "r_sf", "scene.r_sf", Dim::Length, R::Positive, false))
                    sc.r_sf_m = *v;
                if (const auto v = rd.vector<2>(n, "focus", "scene.focus", Dim::Length, R::Any, false))
                    sc.focus = {(*v)[0], (*v)[1], 0.0};
                if (const auto v = rd.quantity(n, "zone_side", "scene.zone_side", Dim::Length, R::Positive, false))
                    sc.zone_side_m = *v;
                if (const auto v = rd.quantity(n, "guard_angle", "scene.guard_angle", Dim::Angle, R::NonNegative, false))
                    sc.guard_angle = *v;
                if (const auto v = rd.quantity(n, "sheet_density", "scene.sheet_density", Dim::Count, R::Positive, false))
                    sc.samples_per_wavelength = *v;
            }
            if (cfg.wavelength_m)
                sc.params = SignalParams::from_wavelength(*cfg.wavelength_m, cfg.beta_magnitude);
            try
            {
                sc.validate();
                if (!(sc.focus.x > 0.0 && sc.focus.x < sc.room_x_m && sc.focus.y > 0.0 && sc.focus.y < sc.room_y_m))
                    throw InvalidParameter("focus must lie inside the room");
            }
            catch (const error &e)
            {
                rd.add("RangeError", "scene", Reader::line_of(n.IsDefined() ? n : root), e.what());
            }
        }

        inline void read_users(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg)
        {
            const YAML::Node us = root["users"];
            if (!us.IsDefined() || us.IsNull())
            {
                rd.add("MissingField", "users", Reader::line_of(root), "at least one user is required");
                return;
            }
            if (!us.IsSequence() || us.size() == 0)
            {
                rd.add("InvalidValue", "users", Reader::line_of(us), "expected a non-empty list of users");
                return;
            }
            for (std::size_t i = 0; i < us.size(); ++i)
            {
                const std::string path = "users[" + std::to_string(i) + "]";
                if (!rd.require_map(us[i], path, Reader::line_of(us)))
                    continue;
                UserEntry u;
                u.line = Reader::line_of(us[i]);
                const auto p = rd.vector<3>(us[i], "position", path + ".position", Dim::Length, Range::Any, true);
                if (p)
                {
                    u.position = {(*p)[0], (*p)[1], (*p)[2]};
                    if (u.position.z == 0.0)
                        rd.add("RangeError", path + ".position", Reader::line_of(us[i]["position"]), "user lies in the surface plane");
                }
                if (const auto r = rd.vector<3>(us[i], "receiver", path + ".receiver", Dim::Length, Range::Positive, false))
                    u.receiver = *r;
                cfg.users.push_back(u);
            }
        }

        inline void read_multiuser(Reader &rd, const YAML::Node &root, ScenarioConfig &cfg)
        {
            const YAML::Node el = root["element"];
            if (rd.require_map(el, "element", Reader::line_of(root)))
                if (const auto v = rd.vector<3>(el, "size", "element.size", Dim::Length, Range::Positive, true))
                    cfg.element_size = *v;
            read_users(rd, root, cfg);
            const YAML::Node st = root["strategies"];
            if (st.IsDefined() && !st.IsNull())
            {
                if (!st.IsSequence() || st.size() == 0)
                    rd.add("InvalidValue", "strategies", Reader::line_of(st), "expected a non-empty list of PS, REG, SEG");
                else
                {
                    cfg.strategies.clear();
                    for (std::size_t i = 0; i < st.size(); ++i)
                    {
                        const auto s = st[i].IsScalar() ? strategy_from(st[i].Scalar()) : std::nullopt;
                        if (!s)
                            rd.add("InvalidValue", "strategies[" + std::to_string(i) + "]", Reader::line_of(st[i]),
                                   "expected PS, REG or SEG");
                        else
                            cfg.strategies.push_back(*s);
                    }
                }
            }
            if (const auto n = rd.count(root, "reg_trials", "reg_trials", 1, false))
                cfg.reg_trials = *n;
            const YAML::Node pw = root["power"];
            if (pw.IsDefined() && !pw.IsNull() && rd.require_map(pw, "power", Reader::line_of(root)))
            {
                if (const auto v = rd.quantity(pw, "tx", "power.tx", Dim::Power, Range::Positive, false))
                    cfg.tx_power_w = *v;
                const auto noise = rd.text(pw, "noise", "power.noise", false);
                if (noise && *noise != "auto")
                    cfg.noise_power_w = rd.quantity(pw, "noise", "power.noise", Dim::Power, Range::Positive, false);
                if (const auto v = rd.quantity(pw, "peak_snr", "power.peak_snr", Dim::Ratio, Range::Any, false))
                    cfg.peak_snr_db = *v;
            }
        }

        // Module preconditions that can be decided before any computation
        inline void preflight(Reader &rd, const ScenarioConfig &cfg, int line)
        {
            try
            {
                cfg.budget.validate();
            }
            catch (const error &e)
            {
                rd.add("RangeError", "budget", line, e.what());
            }
            if (cfg.kind == Experiment::MultiuserSumrate && cfg.sweep && !cfg.users.empty())
            {
                const double half = cfg.sweep->to / 2.0;
                for (std::size_t i = 0; i < cfg.users.size(); ++i)
                {
                    const Point3 &p = cfg.users[i].position;
                    if (std::abs(p.x) <= half && std::abs(p.y) <= half && std::abs(p.z) <= cfg.element_size[2] / 2.0)
                        rd.add("RangeError", "users[" + std::to_string(i) + "].position", cfg.users[i].line,
                               "user lies inside the surface volume");
                    for (std::size_t j = i + 1; j < cfg.users.size(); ++j)
                        if (cfg.users[j].position == p)
                            rd.add("RangeError", "users[" + std::to_string(j) + "].position", cfg.users[j].line,
                                   "users must be distinct");
                }
            }
            if (cfg.kind == Experiment::HybridAngleSweep && cfg.sweep && (!(cfg.sweep->from > 0.0) || !(cfg.sweep->to < pi / 2.0)))
                rd.add("RangeError", "sweep", cfg.sweep->line, "angles must lie in the open interval (0, 90) deg");
            if (cfg.kind == Experiment::GainVsDistance && cfg.sweep && !(cfg.sweep->from > cfg.surface_size[2] / 2.0 + cfg.receiver_size[2] / 2.0))
                rd.add("RangeError", "sweep.from", cfg.sweep->line, "receiver overlaps the surface at the first distance");
        }
    } // namespace detail

    // Parses YAML text; every problem found is reported together
    inline ScenarioConfig parse_scenario_text(const std::string &text)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::Exception &e)
        {
            throw ValidationFailure({{"InvalidValue", "<document>", e.mark.line + 1, e.msg}});
        }
        detail::Reader rd;
        ScenarioConfig cfg;
        if (!root.IsMap())
            throw ValidationFailure({{"InvalidValue", "<document>", 1, "scenario must be a mapping"}});

        const auto exp = rd.text(root, "experiment", "experiment", true);
        std::optional<Experiment> kind;
        if (exp)
        {
            for (const auto &x : experiments)
                if (x.name == *exp)
                    kind = x.kind;
            if (!kind)
                rd.add("InvalidValue", "experiment", detail::Reader::line_of(root["experiment"]), "unknown experiment '" + *exp + "'");
        }
        if (!kind)
            throw ValidationFailure(rd.issues);
        cfg.kind = *kind;
        cfg.name = std::string(to_string(*kind));
        cfg.line = detail::Reader::line_of(root["experiment"]);

        using detail::Range;
        if (const auto n = rd.count(root, "seed", "seed", 0, false))
            cfg.seed = *n;
        const YAML::Node q = root["quadrature"];
        if (q.IsDefined() && !q.IsNull() && rd.require_map(q, "quadrature", cfg.line))
            if (const auto v = rd.quantity(q, "samples_per_wavelength", "quadrature.samples_per_wavelength", Dim::Count, Range::Positive, false))
                cfg.samples_per_wavelength = *v;
        detail::read_budget(rd, root, cfg);

        switch (cfg.kind)
        {
        case Experiment::BoundaryTable:
        {
            detail::read_signal(rd, root, cfg, false);
            detail::read_sweep(rd, root, cfg, "", Dim::Count);
            const YAML::Node rows = root["rows"];
            if (!rows.IsDefined() || rows.IsNull())
                rd.add("MissingField", "rows", cfg.line, "at least one row is required");
            else if (!rows.IsSequence() || rows.size() == 0)
                rd.add("InvalidValue", "rows", detail::Reader::line_of(rows), "expected a non-empty list");
            else
                for (std::size_t i = 0; i < rows.size(); ++i)
                {
                    const std::string path = "rows[" + std::to_string(i) + "]";
                    if (!rd.require_map(rows[i], path, detail::Reader::line_of(rows)))
                        continue;
                    BoundaryRow r;
                    r.line = detail::Reader::line_of(rows[i]);
                    r.label = rd.text(rows[i], "label", path + ".label", false).value_or(std::to_string(i + 1));
                    const auto w = rd.quantity(rows[i], "wavelength", path + ".wavelength", Dim::Length, Range::Positive, false);
                    const auto f = rd.quantity(rows[i], "frequency", path + ".frequency", Dim::Frequency, Range::Positive, false);
                    if (w)
                        r.wavelength_m = *w;
                    else if (f)
                        r.wavelength_m = speed_of_light / *f;
                    else if (cfg.wavelength_m)
                        r.wavelength_m = *cfg.wavelength_m;
                    else if (!rows[i]["wavelength"].IsDefined() && !rows[i]["frequency"].IsDefined())
                        rd.add("MissingField", path + ".frequency", r.line, "frequency or wavelength is required");
                    const auto ris = rd.quantity(rows[i], "ris_size", path + ".ris_size", Dim::Length, Range::Positive, true);
                    const auto rx = rd.quantity(rows[i], "receiver_size", path + ".receiver_size", Dim::Length, Range::Positive, true);
                    if (ris)
                        r.ris_size_m = *ris;
                    if (rx)
                        r.receiver_size_m = *rx;
                    cfg.rows.push_back(r);
                }
            break;
        }
        case Experiment::ScalingSweep:
        {
            detail::read_signal(rd, root, cfg, true);
            detail::read_sweep(rd, root, cfg, "elements", Dim::Count);
            const YAML::Node el = root["element"];
            if (rd.require_map(el, "element", cfg.line))
            {
                if (const auto v = rd.quantity(el, "side", "element.side", Dim::Length, Range::Positive, true))
                    cfg.element_side_m = *v;
                if (const auto v = rd.quantity(el, "thickness", "element.thickness", Dim::Length, Range::Positive, true))
                    cfg.element_thickness_m = *v;
            }
            const YAML::Node rx = root["receiver"];
            if (rd.require_map(rx, "receiver", cfg.line))
            {
                if (const auto v = rd.vector<3>(rx, "size", "receiver.size", Dim::Length, Range::Positive, true))
                    cfg.receiver_size = *v;
                if (const auto v = rd.quantity(rx, "distance", "receiver.distance", Dim::Length, Range::Positive, true))
                    cfg.receiver_distance_m = *v;
            }
            break;
        }
        case Experiment::GainVsDistance:
        {
            detail::read_signal(rd, root, cfg, true);
            detail::read_sweep(rd, root, cfg, "distance", Dim::Length);
            const YAML::Node sf = root["surface"];
            if (rd.require_map(sf, "surface", cfg.line))
                if (const auto v = rd.vector<3>(sf, "size", "surface.size", Dim::Length, Range::Positive, true))
                    cfg.surface_size = *v;
            const YAML::Node rx = root["receiver"];
            if (rd.require_map(rx, "receiver", cfg.line))
                if (const auto v = rd.vector<3>(rx, "size", "receiver.size", Dim::Length, Range::Positive, true))
                    cfg.receiver_size = *v;
            if (const auto b = rd.flag(root, "kernel_oracle", "kernel_oracle"))
                cfg.kernel_oracle = *b;
            cfg.kernel_line = detail::Reader::line_of(root["kernel_oracle"]);
            if (const auto t = rd.quantity(root, "dof_threshold", "dof_threshold", Dim::Count, Range::Positive, false))
            {
                if (*t >= 1.0)
                    rd.add("RangeError", "dof_threshold", detail::Reader::line_of(root["dof_threshold"]), "must lie in (0, 1)");
                else
                    cfg.dof_threshold = *t;
            }
            break;
        }
        case Experiment::MultiuserSumrate:
            detail::read_signal(rd, root, cfg, true);
            detail::read_sweep(rd, root, cfg, "ris_size", Dim::Length);
            detail::read_multiuser(rd, root, cfg);
            break;
        case Experiment::HybridCoverage:
        {
            detail::read_signal(rd, root, cfg, true);
            detail::read_sweep(rd, root, cfg, "", Dim::Count);
            detail::read_scene(rd, root, cfg);
            if (const auto r = rd.quantity(root, "resolution", "resolution", Dim::Density, Range::Positive, false))
            {
                if (*r < 10.0)
                    rd.add("RangeError", "resolution", detail::Reader::line_of(root["resolution"]), "must be at least 10 /m");
                else
                    cfg.resolution = *r;
            }
            const YAML::Node md = root["modes"];
            if (md.IsDefined() && !md.IsNull())
            {
                if (!md.IsSequence() || md.size() == 0)
                    rd.add("InvalidValue", "modes", detail::Reader::line_of(md), "expected a non-empty list of modes");
                else
                {
                    cfg.modes.clear();
                    for (std::size_t i = 0; i < md.size(); ++i)
                    {
                        const auto m = md[i].IsScalar() ? detail::mode_from(md[i].Scalar()) : std::nullopt;
                        if (!m)
                            rd.add("InvalidValue", "modes[" + std::to_string(i) + "]", detail::Reader::line_of(md[i]),
                                   "expected no-window, open-window or star-ris");
                        else
                            cfg.modes.push_back(*m);
                    }
                }
            }
            if (const auto s = rd.text(root, "strategy", "strategy", false); s && *s != "none")
            {
                cfg.coverage_strategy = detail::strategy_from(*s);
                if (!cfg.coverage_strategy)
                    rd.add("InvalidValue", "strategy", detail::Reader::line_of(root["strategy"]), "expected none, PS, REG or SEG");
            }
            break;
        }
        case Experiment::HybridAngleSweep:
            detail::read_signal(rd, root, cfg, true);
            detail::read_sweep(rd, root, cfg, "theta", Dim::Angle);
            detail::read_scene(rd, root, cfg);
            break;
        }
        detail::preflight(rd, cfg, cfg.line);
        if (!rd.issues.empty())
            throw ValidationFailure(rd.issues);
        return cfg;
    }

    inline ScenarioConfig parse_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ValidationFailure({{"MissingField", path.string(), 0, "cannot open scenario file"}});
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_scenario_text(ss.str());
    }

    // Command-line overrides applied after parsing
    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<double> samples_per_wavelength;
        std::optional<double> beta_magnitude;
    };

    inline void apply(ScenarioConfig &cfg, const Overrides &o)
    {
        std::vector<Issue> issues;
        if (o.samples_per_wavelength && !(*o.samples_per_wavelength > 0.0))
            issues.push_back({"RangeError", "--quadrature-density", 0, "must be positive"});
        if (o.beta_magnitude && !(*o.beta_magnitude > 0.0))
            issues.push_back({"RangeError", "--beta-magnitude", 0, "must be positive"});
        if (!issues.empty())
            throw ValidationFailure(issues);
        if (o.seed)
            cfg.seed = *o.seed;
        if (o.samples_per_wavelength)
            cfg.samples_per_wavelength = *o.samples_per_wavelength;
        if (o.beta_magnitude)
        {
            cfg.beta_magnitude = o.beta_magnitude;
            if (cfg.wavelength_m)
                cfg.scene.params = SignalParams::from_wavelength(*cfg.wavelength_m, cfg.beta_magnitude);
        }
    }

    // ------------------------------------------------------------------------------------------------
    // Running

    struct OutputFile
    {
        std::string name;
        std::string content;
    };

    struct RunResult
    {
        std::vector<OutputFile> files;
        std::vector<std::string> notes; // Human-readable summary lines
    };

    namespace detail
    {
        inline std::string num(double v)
        {
            if (std::isnan(v))
                return "NaN";
            char b[40];
            std::snprintf(b, sizeof b, "%.9g", v);
            return b;
        }

        inline std::string db(double v)
        {
            if (std::isnan(v))
                return "NaN";
            char b[40];
            std::snprintf(b, sizeof b, "%.2f", v);
            return b;
        }

        // CSV text plus its column sidecar
        class Table
        {
        public:
            Table(std::string name, std::vector<std::pair<std::string, std::string>> columns)
                : name_(std::move(name)), columns_(std::move(columns)) {}

            void row(const std::vector<std::string> &cells)
            {
                if (cells.size() != columns_.size())
                    throw std::logic_error("CSV row width mismatch");
                for (std::size_t i = 0; i < cells.size(); ++i)
                    body_ += (i ? "," : "") + cells[i];
                body_ += '\n';
            }

            void emit(RunResult &out) const
            {
                std::string head, side;
                for (std::size_t i = 0; i < columns_.size(); ++i)
                {
                    head += (i ? "," : "") + columns_[i].first;
                    side += columns_[i].first + ": " + columns_[i].second + '\n';
                }
                out.files.push_back({name_ + ".csv", head + '\n' + body_});
                out.files.push_back({name_ + ".columns.txt", side});
            }

        private:
            std::string name_;
            std::vector<std::pair<std::string, std::string>> columns_;
            std::string body_;
        };

        template <class F>
        auto at_line(int line, const std::string &what, F &&f) -> decltype(f())
        {
            try
            {
                return f();
            }
            catch (const RuntimeFailure &)
            {
                throw;
            }
            catch (const error &e)
            {
                throw RuntimeFailure("line " + std::to_string(line) + " (" + what + "): " + e.what());
            }
        }

        inline void run_boundary_table(const ScenarioConfig &cfg, RunResult &out)
        {
            Table t("boundary_table", {{"label", "row label"},
                                       {"wavelength_m", "carrier wavelength [m]"},
                                       {"ris_size_m", "square surface side [m]"},
                                       {"receiver_size_m", "square receiver side [m]"},
                                       {"rb_m", "near-field/far-field boundary [m]"},
                                       {"reactive_m", "reactive near-field radius 0.62 sqrt(L^3/lambda) [m]"}});
            for (const auto &r : cfg.rows)
                at_line(r.line, "row " + r.label, [&]
                        {
                            const SignalParams p = SignalParams::from_wavelength(r.wavelength_m, cfg.beta_magnitude);
                            const BoxVolume tx({0.0, 0.0, 0.0}, r.ris_size_m, r.ris_size_m, r.wavelength_m / 4.0);
                            const BoxVolume rx({0.0, 0.0, 1.0}, r.receiver_size_m, r.receiver_size_m, r.wavelength_m / 4.0);
                            const double rb = field_boundary(p, tx, rx);
                            t.row({r.label, num(r.wavelength_m), num(r.ris_size_m), num(r.receiver_size_m), num(rb),
                                   num(reactive_boundary(p, tx))});
                            out.notes.push_back("row " + r.label + ": r_b = " + num(rb) + " m"); });
            t.emit(out);
        }

        inline void run_scaling_sweep(const ScenarioConfig &cfg, RunResult &out)
        {
            const SignalParams p = cfg.signal();
            const BoxVolume rx({0.0, 0.0, cfg.receiver_distance_m}, cfg.receiver_size[0], cfg.receiver_size[1], cfg.receiver_size[2]);
            Table t("scaling", {{"elements", "element count M"},
                                {"tiles", "far-field tiles of the surface"},
                                {"ris_volume_m3", "surface volume [m^3]"},
                                {"max_farfield_volume_m3", "largest far-field volume at the receiver distance [m^3]"},
                                {"regime", "far-field if the surface fits the far-field volume, else near-field"},
                                {"power", "received power, linear"},
                                {"power_db", "received power [dB]"}});
            std::vector<double> mf, pf, mn, pn;
            double crossover = 0.0;
            for (double mv : cfg.sweep->values())
            {
                const auto m = std::size_t(std::llround(mv));
                const ScalingPoint pt = at_line(cfg.sweep->line, "M = " + std::to_string(m), [&]
                                                { return row_scaling_point(p, cfg.budget, cfg.element_side_m, cfg.element_thickness_m, m, rx); });
                const bool far = pt.ris_volume_m3 <= pt.max_farfield_volume_m3;
                (far ? mf : mn).push_back(double(m));
                (far ? pf : pn).push_back(pt.power);
                crossover = pt.max_farfield_volume_m3 / (pt.ris_volume_m3 / double(m));
                t.row({std::to_string(m), std::to_string(pt.tiles), num(pt.ris_volume_m3), num(pt.max_farfield_volume_m3),
                       far ? "far-field" : "near-field", num(pt.power), db(to_db(pt.power))});
            }
            t.emit(out);
            Table f("scaling_fit", {{"limb", "far-field or near-field"},
                                    {"points", "sweep points in the limb"},
                                    {"slope", "least-squares slope of log power against log M"},
                                    {"crossover_elements", "element count at which the surface fills the far-field volume"}});
            auto fit = [](const std::vector<double> &x, const std::vector<double> &y)
            { return x.size() >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN(); };
            const double sf = fit(mf, pf), sn = fit(mn, pn);
            f.row({"far-field", std::to_string(mf.size()), num(sf), num(crossover)});
            f.row({"near-field", std::to_string(mn.size()), num(sn), num(crossover)});
            f.emit(out);
            out.notes.push_back("far-field slope " + num(sf) + ", near-field slope " + num(sn) + ", crossover M = " + num(crossover));
        }

        inline void run_gain_vs_distance(const ScenarioConfig &cfg, RunResult &out)
        {
            const SignalParams p = cfg.signal();
            const BoxVolume tx({0.0, 0.0, 0.0}, cfg.surface_size[0], cfg.surface_size[1], cfg.surface_size[2]);
            std::vector<std::pair<std::string, std::string>> cols{
                {"distance_m", "receiver distance along the surface normal [m]"},
                {"rb_m", "near-field/far-field boundary [m]"},
                {"reactive_m", "reactive near-field radius [m]"},
                {"region", "reactive, radiating-near-field, far-field or undefined (reactive radius beyond r_b)"},
                {"dof", "analytic degrees of freedom"},
                {"tiles", "far-field tiles of the surface"},
                {"gain", "channel gain upper bound with per-tile focusing, linear"},
                {"gain_db", "channel gain upper bound [dB]"},
                {"gain_single_tile", "single-tile closed form D A_T beta^2 V_R V_T / (4 pi d^2 (4 pi r)^2), linear"}};
            if (cfg.kernel_oracle)
            {
                cols.push_back({"kernel_gain", "link factor times the largest kernel eigenvalue, linear"});
                cols.push_back({"kernel_dof", "kernel eigenvalues at or above the DoF threshold times the largest"});
            }
            Table t("gain_distance", cols);
            for (double d : cfg.sweep->values())
            {
                std::vector<std::string> row = at_line(cfg.sweep->line, "distance " + num(d) + " m", [&]
                                                       {
                    const BoxVolume rx({0.0, 0.0, d}, cfg.receiver_size[0], cfg.receiver_size[1], cfg.receiver_size[2]);
                    const double rb = field_boundary(p, tx, rx), rr = reactive_boundary(p, tx);
                    std::string region = "undefined";
                    if (rr < rb)
                        region = std::string(to_string(classify(p, tx, rx, d).region));
                    const TilePartition part = partition_tiles(p, tx, rx, rx.center);
                    const double g = channel_gain_upper_bound(p, cfg.budget, part, rx);
                    const double s = 4.0 * pi * d;
                    const double g1 = cfg.budget.friis_factor() * p.beta_sq() * rx.volume() * tx.volume() / (s * s);
                    std::vector<std::string> r{num(d), num(rb), num(rr), region, std::to_string(analytic_dof(p, tx, rx, d)),
                                               std::to_string(part.size()), num(g), db(to_db(g)), num(g1)};
                    if (cfg.kernel_oracle)
                    {
                        const QuadratureGrid tg = QuadratureGrid::with_density(tx, p, cfg.samples_per_wavelength);
                        const QuadratureGrid rg = QuadratureGrid::with_density(rx, p, cfg.samples_per_wavelength);
                        if (double(tg.size()) * double(rg.size()) > 5e7)
                            throw InvalidParameter("kernel oracle grid too large; lower the quadrature density");
                        const KernelMatrix k = build_kernel_matrix(p, tg, rx, rg);
                        const Eigen::VectorXd ev = kernel_spectrum(k, cfg.dof_threshold);
                        r.push_back(num(cfg.budget.friis_factor() * ev(0)));
                        r.push_back(std::to_string(effective_dof(k, cfg.dof_threshold)));
                    }
                    return r; });
                t.row(row);
            }
            t.emit(out);
        }

        inline void run_multiuser(const ScenarioConfig &cfg, RunResult &out)
        {
            const SignalParams p = cfg.signal();
            std::vector<UserSpec> users;
            for (const auto &u : cfg.users)
                users.push_back(UserSpec::at(u.position, u.receiver[0], u.receiver[1], u.receiver[2]));

            struct Point
            {
                double size;
                std::size_t elements;
                Strategy kind;
                std::vector<double> gains;
                std::vector<std::size_t> dof;
            };
            std::vector<Point> pts;
            for (double size : cfg.sweep->values())
            {
                const auto nx = std::size_t(std::max(1LL, std::llround(size / cfg.element_size[0])));
                const auto ny = std::size_t(std::max(1LL, std::llround(size / cfg.element_size[1])));
                const RisLayout layout = RisLayout::grid({0.0, 0.0, 0.0}, nx, ny, cfg.element_size[0], cfg.element_size[1],
                                                         cfg.element_size[2]);
                const BoxVolume full = layout.bounding_box();
                for (Strategy s : cfg.strategies)
                    pts.push_back(at_line(cfg.sweep->line, std::string(to_string(s)) + " at size " + num(size) + " m", [&]
                                          {
                        Point pt{size, layout.size(), s, std::vector<double>(users.size(), 0.0), {}};
                        const std::size_t trials = s == Strategy::REG ? cfg.reg_trials : 1;
                        std::vector<std::size_t> grouping;
                        for (std::size_t t = 0; t < trials; ++t)
                        {
                            if (s != Strategy::PS)
                                grouping = make_grouping(s, layout, users, cfg.seed + t);
                            for (std::size_t u = 0; u < users.size(); ++u)
                            {
                                const double g = s == Strategy::PS    ? gain_ps(p, cfg.budget, layout, users, u, cfg.samples_per_wavelength)
                                                 : s == Strategy::REG ? gain_reg(p, cfg.budget, layout, users, grouping, u)
                                                                      : gain_seg(p, cfg.budget, layout, users, grouping, u);
                                pt.gains[u] += g / double(trials);
                            }
                        }
                        for (std::size_t u = 0; u < users.size(); ++u)
                        {
                            BoxVolume own = full;
                            if (s != Strategy::PS)
                            {
                                std::vector<std::size_t> members;
                                for (std::size_t m = 0; m < grouping.size(); ++m)
                                    if (grouping[m] == u)
                                        members.push_back(m);
                                own = layout.bounding_box(members);
                            }
                            pt.dof.push_back(analytic_dof(p, own, users[u].receive_volume, distance(own.center, users[u].position)));
                        }
                        return pt; }));
            }

            double peak = 0.0;
            for (const auto &pt : pts)
                for (double g : pt.gains)
                    peak = std::max(peak, g);
            const double noise = cfg.noise_power_w.value_or(cfg.tx_power_w * peak / from_db(cfg.peak_snr_db));

            Table g("multiuser_gains", {{"ris_size_m", "square surface side [m]"},
                                        {"elements", "element count"},
                                        {"strategy", "PS, REG (mean over trials) or SEG"},
                                        {"user", "user index"},
                                        {"gain", "end-to-end channel gain, linear"},
                                        {"gain_db", "end-to-end channel gain [dB]"},
                                        {"snr_db", "gain times tx power over noise power [dB]"},
                                        {"dof", "analytic DoF of the sub-surface serving the user"}});
            Table r("multiuser_sumrate", {{"ris_size_m", "square surface side [m]"},
                                          {"elements", "element count"},
                                          {"strategy", "PS, REG or SEG"},
                                          {"sum_rate_bps_hz", "sum over users of log2(1 + SNR) [bit/s/Hz]"}});
            for (const auto &pt : pts)
            {
                for (std::size_t u = 0; u < pt.gains.size(); ++u)
                    g.row({num(pt.size), std::to_string(pt.elements), std::string(to_string(pt.kind)), std::to_string(u),
                           num(pt.gains[u]), db(to_db(pt.gains[u])), db(to_db(pt.gains[u] * cfg.tx_power_w / noise)),
                           std::to_string(pt.dof[u])});
                r.row({num(pt.size), std::to_string(pt.elements), std::string(to_string(pt.kind)),
                       num(sum_rate(pt.gains, cfg.tx_power_w, noise))});
            }
            g.emit(out);
            r.emit(out);
            out.notes.push_back("noise power " + num(noise) + " W" + (cfg.noise_power_w ? "" : " (calibrated to the peak SNR)"));
        }

        inline void run_hybrid_coverage(const ScenarioConfig &cfg, RunResult &out)
        {
            std::optional<StrategyConfig> strat;
            if (cfg.coverage_strategy)
                strat = StrategyConfig{*cfg.coverage_strategy, {}, cfg.seed};
            Table t("coverage_summary", {{"mode", "no-window, open-window or star-ris"},
                                         {"zone_avg_db", "power average over the focus zone [dB re incident density]"},
                                         {"min_db", "grid minimum [dB]"},
                                         {"min_x_m", "x of the minimum cell center [m]"},
                                         {"min_y_m", "y of the minimum cell center [m]"},
                                         {"max_db", "grid maximum [dB]"},
                                         {"max_x_m", "x of the maximum cell center [m]"},
                                         {"max_y_m", "y of the maximum cell center [m]"}});
            for (CoverageMode m : cfg.modes)
            {
                const CoverageGrid g = at_line(cfg.line, std::string(to_string(m)) + " coverage", [&]
                                               { return coverage_grid(cfg.scene, m, strat, cfg.resolution); });
                std::ostringstream ras;
                g.write_raster(ras);
                out.files.push_back({"coverage_" + std::string(to_string(m)) + ".raster", ras.str()});
                double lo = 1e300, hi = -1e300;
                Point3 plo, phi;
                for (std::size_t iy = 0; iy < g.ny; ++iy)
                    for (std::size_t ix = 0; ix < g.nx; ++ix)
                    {
                        const double v = g.at(ix, iy);
                        if (std::isnan(v))
                            continue;
                        if (v < lo)
                            lo = v, plo = g.cell_center(ix, iy);
                        if (v > hi)
                            hi = v, phi = g.cell_center(ix, iy);
                    }
                const double zone = g.zone_average_db(cfg.scene.focus, cfg.scene.zone_side_m);
                t.row({std::string(to_string(m)), db(zone), db(lo), num(plo.x), num(plo.y), db(hi), num(phi.x), num(phi.y)});
                out.notes.push_back(std::string(to_string(m)) + ": zone average " + db(zone) + " dB");
            }
            t.emit(out);
        }

        inline void run_hybrid_angle_sweep(const ScenarioConfig &cfg, RunResult &out)
        {
            const std::vector<double> angles = cfg.sweep->values();
            const auto rows = at_line(cfg.sweep->line, "angle sweep", [&]
                                      { return angle_sweep(cfg.scene, angles); });
            Table t("angle_sweep", {{"theta_deg", "user angle theta_F = theta_N [deg]"},
                                    {"gain_f_no_star_db", "outdoor user without surface, D(theta) A_F / r_OF [dB]"},
                                    {"gain_n_no_star_db", "indoor user without surface, diffraction law [dB]"},
                                    {"gain_f_ps_db", "outdoor user with STAR-RIS, power splitting [dB]"},
                                    {"gain_n_ps_db", "indoor user with STAR-RIS, power splitting [dB]"}});
            double fmin = 1e300, fmax = -1e300, nmin = 1e300, nmax = -1e300;
            for (const auto &r : rows)
            {
                t.row({num(r.theta * 180.0 / pi), db(to_db(r.gain_f_no_star)), db(to_db(r.gain_n_no_star)),
                       db(to_db(r.gain_f_ps)), db(to_db(r.gain_n_ps))});
                fmin = std::min(fmin, to_db(r.gain_f_ps)), fmax = std::max(fmax, to_db(r.gain_f_ps));
                nmin = std::min(nmin, to_db(r.gain_n_ps)), nmax = std::max(nmax, to_db(r.gain_n_ps));
            }
            t.emit(out);
            Table s("angle_sweep_summary", {{"column", "swept gain column"}, {"spread_db", "maximum minus minimum over the sweep [dB]"}});
            s.row({"gain_f_ps_db", db(fmax - fmin)});
            s.row({"gain_n_ps_db", db(nmax - nmin)});
            s.emit(out);
            out.notes.push_back("PS spread: outdoor " + db(fmax - fmin) + " dB, indoor " + db(nmax - nmin) + " dB");
        }
    } // namespace detail

    // Runs the configured experiment and returns every output in memory
    inline RunResult run_experiment(const ScenarioConfig &cfg)
    {
        RunResult out;
        switch (cfg.kind)
        {
        case Experiment::BoundaryTable:
            detail::run_boundary_table(cfg, out);
            break;
        case Experiment::ScalingSweep:
            detail::run_scaling_sweep(cfg, out);
            break;
        case Experiment::GainVsDistance:
            detail::run_gain_vs_distance(cfg, out);
            break;
        case Experiment::MultiuserSumrate:
            detail::run_multiuser(cfg, out);
            break;
        case Experiment::HybridCoverage:
            detail::run_hybrid_coverage(cfg, out);
            break;
        case Experiment::HybridAngleSweep:
            detail::run_hybrid_angle_sweep(cfg, out);
            break;
        }
        return out;
    }

    // Writes each file through a temporary name and an atomic rename
    inline void write_outputs(const std::filesystem::path &dir, const std::vector<OutputFile> &files)
    {
        std::filesystem::create_directories(dir);
        for (const auto &f : files)
        {
            const std::filesystem::path final_path = dir / f.name;
            const std::filesystem::path tmp = dir / ("." + f.name + ".tmp");
            {
                std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
                if (!os)
                    throw RuntimeFailure("cannot write " + tmp.string());
                os << f.content;
                if (!os.flush())
                    throw RuntimeFailure("cannot write " + tmp.string());
            }
            std::filesystem::rename(tmp, final_path);
        }
    }

} // namespace starris::scenario

#endif
