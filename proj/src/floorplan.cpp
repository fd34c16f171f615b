// SPDX-License-Identifier: Apache-2.0
//
// mmwave-indoor: stochastic indoor environments and rough-surface mmWave propagation
// Copyright (C) 2026 The mmwave-indoor authors
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

#include "mmw/floorplan.hpp"

#include <cmath>

namespace mmw
{
    namespace
    {
        // Independent streams derived from one user seed.
        std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
            return std::mt19937_64(seq);
        }

        void add_wall(Environment3D &env, ObstacleKind kind, const std::string &material, const Vec2 &a, const Vec2 &b,
                      double height)
        {
            if ((b - a).norm() < 1e-12 || height <= 0.0)
                return;
            env.obstacles.emplace_back(kind, material,
                                       std::vector<Vec3>{{a.x(), a.y(), 0.0},
                                                         {b.x(), b.y(), 0.0},
                                                         {b.x(), b.y(), height},
                                                         {a.x(), a.y(), height}});
        }
    } // namespace

    void EnvParams::validate() const
    {
        if (sides < 3)
            fail(ErrorKind::invalid_argument, "sides must be >= 3");
        if (!(window_radius > 0.0))
            fail(ErrorKind::invalid_argument, "window radius must be > 0");
        if (!(h_c > 0.0))
            fail(ErrorKind::invalid_argument, "ceiling height must be > 0");
        if (!(w_c > 0.0))
            fail(ErrorKind::invalid_argument, "corridor width must be > 0");
        if (!(h_wa > 0.0) || h_wa > h_c)
            fail(ErrorKind::invalid_argument, "inner wall height h_wa must be in (0, h_c]");
        if (h_wm && !(*h_wm >= 0.0 && *h_wm < h_wa))
            fail(ErrorKind::invalid_argument, "minimum wall height h_wm must be in [0, h_wa)");
        if (door.kind == DoorMode::Kind::pcent && !(door.w0_percent > 0.0 && door.w0_percent <= 100.0))
            fail(ErrorKind::invalid_argument, "door width w0 must be in (0, 100] percent");
        for (const auto *id : {&floor_material, &ceiling_material, &outer_material, &inner_material})
            if (!materials.contains(*id))
                fail(ErrorKind::config, "unknown material_id '" + *id + "'");
    }

    Cell initial_cell(int sides, double window_radius)
    {
        if (sides < 3)
            fail(ErrorKind::invalid_argument, "initial cell needs at least 3 sides");
        if (!(window_radius > 0.0))
            fail(ErrorKind::invalid_argument, "window radius must be > 0");
        return regular_polygon(sides, window_radius);
    }

    Cell inward_offset(const Cell &cell, double distance)
    {
        Cell out = cell;
        for (std::size_t k = 0; k < out.tags.size(); ++k)
            out.tags[k] = static_cast<int>(k);
        for (std::size_t k = 0; k < cell.size() && !out.empty(); ++k)
        {
            const Vec2 a = cell.edge_start(k), e = cell.edge_end(k) - a;
            const Vec2 n = Vec2(-e.y(), e.x()).normalized(); // interior side of a ccw ring
            out = clip(out, Line{n, n.dot(a) + distance}, static_cast<int>(k));
        }
        if (!out.empty() && area(out) <= 1e-12 * std::max(1.0, area(cell)))
            out = Cell{};
        return out;
    }

    ShrinkReport shrink_cells(const Tessellation &tess, double w_c)
    {
        if (!(w_c > 0.0))
            fail(ErrorKind::invalid_argument, "corridor width must be > 0");
        ShrinkReport report;
        for (std::size_t i = 0; i < tess.cells.size(); ++i)
        {
            Cell room = inward_offset(tess.cells[i], 0.5 * w_c);
            if (room.empty())
            {
                ++report.dropped;
                continue;
            }
            report.rooms.push_back({std::move(room), static_cast<int>(i), std::nullopt, 0.0});
        }
        return report;
    }

    void add_doors(std::vector<Room> &rooms, const DoorMode &mode, std::uint64_t seed)
    {
        if (mode.kind == DoorMode::Kind::pcent && !(mode.w0_percent > 0.0 && mode.w0_percent <= 100.0))
            fail(ErrorKind::invalid_argument, "door width w0 must be in (0, 100] percent");
        auto rng = stream_rng(seed, 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto &room : rooms)
        {
            if (room.polygon.size() == 0)
                fail(ErrorKind::invalid_argument, "room without edges");
            std::uniform_int_distribution<int> pick(0, static_cast<int>(room.polygon.size()) - 1);
            const int k = pick(rng);
            const double l = (room.polygon.edge_end(k) - room.polygon.edge_start(k)).norm();
            // 1 - U lies in (0, 1]
            const double frac = mode.kind == DoorMode::Kind::pcent ? mode.w0_percent / 100.0 : 1.0 - unit(rng);
            room.door = Door{k, 0.5 * l, frac * l};
        }
    }

    double draw_wall_height(std::mt19937_64 &rng, double h_wm, double h_wa, double h_max)
    {
        std::exponential_distribution<double> ex(1.0 / (h_wa - h_wm));
        return std::min(h_wm + ex(rng), h_max);
    }

    double wall_length(const Room &room)
    {
        double len = perimeter(room.polygon);
        if (room.door)
            len -= room.door->width;
        return len;
    }

    Environment3D extrude_3d(const Cell &window, std::vector<Room> &rooms, const EnvParams &params,
                             std::uint64_t seed)
    {
        params.validate();
        Environment3D env;
        env.materials = params.materials;

        std::vector<Vec3> floor, ceiling;
        for (const auto &v : window.vertices)
        {
            floor.emplace_back(v.x(), v.y(), 0.0);
            ceiling.emplace_back(v.x(), v.y(), params.h_c);
        }
        env.obstacles.emplace_back(ObstacleKind::floor, params.floor_material, std::move(floor));
        env.obstacles.emplace_back(ObstacleKind::ceiling, params.ceiling_material, std::move(ceiling));
        for (std::size_t k = 0; k < window.size(); ++k)
            add_wall(env, ObstacleKind::outer_wall, params.outer_material, window.edge_start(k), window.edge_end(k),
                     params.h_c);

        auto rng = stream_rng(seed, 2);
        for (auto &room : rooms)
        {
            room.wall_height = params.h_wm ? draw_wall_height(rng, *params.h_wm, params.h_wa, params.h_c) : params.h_wa;
            const auto &poly = room.polygon;
            for (std::size_t k = 0; k < poly.size(); ++k)
            {
                const Vec2 a = poly.edge_start(k), b = poly.edge_end(k);
                if (room.door && room.door->edge == static_cast<int>(k))
                {
                    const Vec2 u = (b - a).normalized();
                    const double l = (b - a).norm();
                    const double s0 = std::max(0.0, room.door->center - 0.5 * room.door->width);
                    const double s1 = std::min(l, room.door->center + 0.5 * room.door->width);
                    add_wall(env, ObstacleKind::inner_wall, params.inner_material, a, a + s0 * u, room.wall_height);
                    add_wall(env, ObstacleKind::inner_wall, params.inner_material, a + s1 * u, b, room.wall_height);
                }
                else
                    add_wall(env, ObstacleKind::inner_wall, params.inner_material, a, b, room.wall_height);
            }
        }
        env.validate();
        return env;
    }

    Environment3D generate_environment(const EnvParams &params, TessellationParams tess, GenerationReport *report)
    {
        params.validate();
        tess.tilt = params.tilt;
        const Cell window = initial_cell(params.sides, params.window_radius);
        const Tessellation t = sample_tessellation(window, tess);
        auto shrunk = shrink_cells(t, params.w_c);
        add_doors(shrunk.rooms, params.door, tess.seed);
        Environment3D env = extrude_3d(window, shrunk.rooms, params, tess.seed);
        if (report)
        {
            report->cells = t.cells.size();
            report->rooms = shrunk.rooms.size();
            report->dropped_cells = shrunk.dropped;
            report->obstacles = env.obstacles.size();
        }
        return env;
    }
} // namespace mmw
