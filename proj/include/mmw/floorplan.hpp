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

#ifndef MMW_FLOORPLAN_HPP
#define MMW_FLOORPLAN_HPP

#include "mmw/environment.hpp"
#include "mmw/geometry.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mmw
{
    struct DoorMode
    {
        enum class Kind
        {
            pcent,
            rand
        };
        Kind kind = Kind::rand;
        double w0_percent = 100.0; // pcent only

        static DoorMode pcent(double w0) { return {Kind::pcent, w0}; }
        static DoorMode random() { return {Kind::rand, 0.0}; }
    };

    struct EnvParams
    {
        int sides = 4;
        double window_radius = 10.0; // m
        double h_c = 3.0;            // ceiling height
        double w_c = 1.0;            // corridor width
        DoorMode door;
        double h_wa = 3.0;                 // mean inner-wall height
        std::optional<double> h_wm;        // set for random wall heights
        double tilt = 0.0;                 // rotation of the tessellation lines (rad)

        std::string floor_material = "floor";
        std::string ceiling_material = "ceiling";
        std::string outer_material = "wall";
        std::string inner_material = "wall";
        std::map<std::string, Material> materials;

        void validate() const;
    };

    struct Door
    {
        int edge = 0;       // index into the room ring
        double center = 0;  // distance of the opening centre from the edge start
        double width = 0;
    };

    struct Room
    {
        Cell polygon;     // tags hold the index of the parent cell edge each side is parallel to
        int parent = -1;  // index of the tessellation cell
        std::optional<Door> door;
        double wall_height = 0.0;
    };

    struct ShrinkReport
    {
        std::vector<Room> rooms;
        std::size_t dropped = 0; // cells whose offset polygon vanished
    };

    struct GenerationReport
    {
        std::size_t cells = 0;
        std::size_t rooms = 0;
        std::size_t dropped_cells = 0;
        std::size_t obstacles = 0;
    };

    Cell initial_cell(int sides, double window_radius);

    // Inward parallel offset of every cell at distance w_c / 2.
    ShrinkReport shrink_cells(const Tessellation &tess, double w_c);
    Cell inward_offset(const Cell &cell, double distance);

    // One opening per room on a uniformly chosen edge, centred on the edge midpoint.
    void add_doors(std::vector<Room> &rooms, const DoorMode &mode, std::uint64_t seed);

    // h_wm + Exponential(mean h_wa - h_wm), clamped to h_max.
    double draw_wall_height(std::mt19937_64 &rng, double h_wm, double h_wa, double h_max);

    // Outer shell (floor, ceiling, surrounding walls) plus the inner walls of every room.
    // Rooms get their wall_height assigned here.
    Environment3D extrude_3d(const Cell &window, std::vector<Room> &rooms, const EnvParams &params,
                             std::uint64_t seed);

    // Length of wall left along the room outline after removing the door opening.
    double wall_length(const Room &room);

    // initial cell -> tessellation -> rooms -> doors -> 3D. params.tilt overrides tess.tilt.
    Environment3D generate_environment(const EnvParams &params, TessellationParams tess,
                                       GenerationReport *report = nullptr);
} // namespace mmw

#endif
