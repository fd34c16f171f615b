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

#ifndef MMW_GEOMETRY_HPP
#define MMW_GEOMETRY_HPP

#include "mmw/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace mmw
{
    // ---------------------------------------------------------------------------------------------
    // Convex polygons
    // ---------------------------------------------------------------------------------------------

    // Edge tag of a window boundary edge; non-negative tags are segment ids of the tessellation.
    inline constexpr int boundary_tag = -1;

    // Convex cell stored as a counter-clockwise vertex ring. Edge k runs from vertex k to vertex
    // k+1 (mod n) and carries tags[k].
    struct Cell
    {
        std::vector<Vec2> vertices;
        std::vector<int> tags;

        std::size_t size() const { return vertices.size(); }
        bool empty() const { return vertices.size() < 3; }
        Vec2 edge_start(std::size_t k) const { return vertices[k]; }
        Vec2 edge_end(std::size_t k) const { return vertices[(k + 1) % vertices.size()]; }
    };

    // Oriented line {x : normal . x = offset}.
    struct Line
    {
        Vec2 normal;
        double offset = 0.0;

        double signed_distance(const Vec2 &x) const { return normal.dot(x) - offset; }

        // Line whose direction makes angle theta with the x-axis.
        static Line from_direction(double theta, double offset)
        {
            return {Vec2(-std::sin(theta), std::cos(theta)), offset};
        }
    };

    struct Segment
    {
        Vec2 a, b;
        double length() const { return (b - a).norm(); }
    };

    template <typename Scalar>
    Scalar signed_area(std::span<const Vec2T<Scalar>> ring)
    {
        Scalar twice = 0;
        for (std::size_t i = 0, n = ring.size(); i < n; ++i)
            twice += cross2<Scalar>(ring[i], ring[(i + 1) % n]);
        return twice / Scalar(2);
    }

    template <typename Scalar>
    Scalar perimeter(std::span<const Vec2T<Scalar>> ring)
    {
        Scalar sum = 0;
        for (std::size_t i = 0, n = ring.size(); i < n; ++i)
            sum += (ring[(i + 1) % n] - ring[i]).norm();
        return sum;
    }

    inline double area(const Cell &c) { return signed_area<double>(c.vertices); }
    inline double perimeter(const Cell &c) { return perimeter<double>(c.vertices); }

    // True when every turn is a left turn (interior angles <= pi + tol).
    bool is_convex(const Cell &c, double angle_tol = 1e-12);

    // Width of the projection of the cell onto a unit normal.
    double projection_width(const Cell &c, const Vec2 &normal);
    std::pair<double, double> projection_range(const Cell &c, const Vec2 &normal);

    // Largest vertex-to-vertex distance.
    double diameter(const Cell &c);

    // Keeps the part of the cell on the non-negative side of the line. Edges created along
    // the line receive chord_tag. Returns an empty cell when nothing is left.
    Cell clip(const Cell &c, const Line &line, int chord_tag);

    struct Split
    {
        Cell positive, negative;
        Segment chord;
        int tag_a = boundary_tag; // tag of the edge the chord starts on
        int tag_b = boundary_tag; // tag of the edge the chord ends on
    };

    // Divides a convex cell along a line. Empty when the line misses the interior.
    std::optional<Split> split(const Cell &c, const Line &line, int chord_tag);

    // Regular polygon centred at the origin, circumscribed radius as given, all edges tagged
    // as window boundary.
    Cell regular_polygon(int sides, double radius);

    bool contains_strictly(const Cell &c, const Vec2 &x, double margin = 1e-9);

    // ---------------------------------------------------------------------------------------------
    // Tessellations
    // ---------------------------------------------------------------------------------------------

    enum class Topology
    {
        plt,
        stit
    };

    // Orientation law of the tessellation lines. The mixture is alpha * axis_pair + (1 - alpha)
    // * isotropic; `single` is the degenerate law with all lines parallel.
    struct DirectionLaw
    {
        enum class Mode
        {
            isotropic,
            axis_pair,
            mixture,
            single
        };
        Mode mode = Mode::isotropic;
        double alpha = 0.0;

        static DirectionLaw isotropic() { return {Mode::isotropic, 0.0}; }
        static DirectionLaw axis_pair() { return {Mode::axis_pair, 1.0}; }
        static DirectionLaw mixture(double alpha) { return {Mode::mixture, alpha}; }
        static DirectionLaw single() { return {Mode::single, 0.0}; }

        // Weight of the axis-pair atoms.
        double axis_weight() const;
        void validate() const;
    };

    // Area of the parallelogram spanned by two independent unit directions, averaged under
    // the law. Closed form for the supported family.
    double anisotropy_xi(const DirectionLaw &law);

    enum class MorphologyReference
    {
        edge_density,
        mean_area,
        mean_perimeter
    };

    struct TessellationParams
    {
        Topology topology = Topology::plt;
        double edge_density = 1.0; // L_A, total edge length per unit area
        DirectionLaw law;
        double tilt = 0.0;
        MorphologyReference reference = MorphologyReference::edge_density;
        double reference_value = 0.0; // mean cell area or perimeter when used as reference
        std::uint64_t seed = 1;

        // L_A after converting an area or perimeter reference with the mean-value formulas.
        double resolved_edge_density() const;
    };

    struct TessVertex
    {
        Vec2 position;
        int degree = 0;
    };

    struct Tessellation
    {
        Topology topology = Topology::plt;
        double edge_density = 0.0;
        double xi = 0.0;
        Cell window;
        std::vector<Cell> cells;
        std::vector<Segment> segments;  // maximal segments (chords) inside the window
        std::vector<TessVertex> vertices; // interior vertices only
    };

    // Line measure restricted to lines hitting a convex cell: total mass and sampling.
    class LineMeasure
    {
    public:
        LineMeasure(DirectionLaw law, double tilt);

        // Measure of the set of lines hitting the cell (unit length intensity).
        double hitting_mass(const Cell &c) const;

        // Draws a line from the measure restricted to lines hitting the cell.
        Line sample_hitting(const Cell &c, std::mt19937_64 &rng) const;

    private:
        DirectionLaw law_;
        double tilt_;
    };

    Tessellation sample_plt(const Cell &window, const TessellationParams &params);
    Tessellation sample_stit(const Cell &window, const TessellationParams &params);
    Tessellation sample_tessellation(const Cell &window, const TessellationParams &params);

    struct MorphStats
    {
        double edge_length_density = 0;
        double vertex_density = 0;
        double edge_density = 0;
        double cell_density = 0;
        double typical_edge_length = 0;
        double typical_cell_perimeter = 0;
        double typical_cell_area = 0;

        // Raw counts behind the densities, useful for pooling several windows.
        double window_area = 0;
        double total_edge_length = 0;
        double vertex_count = 0;
        double edge_count = 0;
        double cell_count = 0;
        double perimeter_sum = 0; // total perimeter attributed to the counted cells
    };

    enum class EdgeCorrection
    {
        // Features touching the window boundary are excluded: vertices on the boundary are not
        // counted and a cell is counted through its lowest corner, which must be interior.
        minus_sampling,
        // Every clipped cell counts; typical values are plain averages over clipped cells.
        none
    };

    MorphStats morphology_stats(const Tessellation &tess, const Cell &window,
                                EdgeCorrection correction = EdgeCorrection::minus_sampling);

    // Combines per-window counts into ratio estimators over the pooled area.
    MorphStats pool_morphology(std::span<const MorphStats> parts);

    MorphStats expected_morphology(Topology topology, double edge_density, double xi);
} // namespace mmw

#endif
