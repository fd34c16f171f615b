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

#ifndef MMW_ENVIRONMENT_HPP
#define MMW_ENVIRONMENT_HPP

#include "mmw/core.hpp"
#include "mmw/material.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmw
{
    enum class ObstacleKind
    {
        floor,
        ceiling,
        outer_wall,
        inner_wall,
        measure
    };

    std::string_view to_string(ObstacleKind kind);
    std::optional<ObstacleKind> parse_obstacle_kind(std::string_view text);

    // Planar simple polygon. Intersection data is cached at construction.
    class Obstacle
    {
    public:
        Obstacle(ObstacleKind kind, std::string material, std::vector<Vec3> vertices);

        ObstacleKind kind() const { return kind_; }
        const std::string &material() const { return material_; }
        const std::vector<Vec3> &vertices() const { return vertices_; }
        const Vec3 &normal() const { return normal_; }
        double plane_offset() const { return offset_; }
        const Eigen::AlignedBox3d &box() const { return box_; }
        bool physical() const { return kind_ != ObstacleKind::measure; }

        // Largest distance of a vertex to the polygon plane.
        double planarity_error() const;

        // Ray parameter of the hit, or nullopt for a miss. Rays with |dir . n| < 1e-9 miss.
        std::optional<double> intersect(const Vec3 &origin, const Vec3 &dir) const;

        // Point-in-polygon on the plane (boundary inclusive within tol).
        bool contains(const Vec3 &on_plane, double tol = 1e-9) const;

        // Does the horizontal footprint touch the closed rectangle?
        bool overlaps_xy(const Eigen::AlignedBox2d &rect) const;

    private:
        ObstacleKind kind_;
        std::string material_;
        std::vector<Vec3> vertices_;
        Vec3 normal_;
        double offset_ = 0.0;
        Eigen::AlignedBox3d box_;
        int drop_axis_ = 2; // coordinate dropped when projecting to 2D
        std::vector<Vec2> projected_;
    };

    class Environment3D
    {
    public:
        std::vector<Obstacle> obstacles;
        std::map<std::string, Material> materials;

        // Box around every physical obstacle.
        Eigen::AlignedBox3d bounds() const;

        // Adds or replaces the imaginary horizontal plane covering the bounds at height h_m.
        void set_measurement_plane(double h_m);
        std::optional<double> measurement_height() const;

        std::size_t count(ObstacleKind kind) const;

        // Checks the structural invariants (one floor, one ceiling, planar polygons, known
        // materials). Throws Error(format) naming the problem.
        void validate() const;
    };

    // Line-oriented text format:
    //   material <id> <sigma0_m> <tau_m> <n_re> <n_im>
    //   obstacle <kind> <material_id> <n_vertices> x1 y1 z1 x2 y2 z2 ...
    // '#' starts a comment. The measurement plane uses kind `measure` and material `-`.
    Environment3D parse_environment(std::istream &in, const std::string &source = "<stream>");
    Environment3D load_custom(const std::filesystem::path &path);

    // Writes shortest round-trip decimal representations, so reloading is exact.
    void write_environment(std::ostream &out, const Environment3D &env, std::string_view header = {});
    void save_environment(const std::filesystem::path &path, const Environment3D &env,
                          std::string_view header = {});
} // namespace mmw

#endif
