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

#ifndef MMW_QUADINDEX_HPP
#define MMW_QUADINDEX_HPP

#include "mmw/environment.hpp"

#include <optional>
#include <vector>

namespace mmw
{
    struct RayHit
    {
        int obstacle = -1;
        double t = 0.0; // ray parameter; equals distance for unit directions
        Vec3 point = Vec3::Zero();
    };

    // Quadrant index over the horizontal footprint of the physical obstacles. Subdividing
    // the bounding rectangle `depth` times into four gives a regular 2^depth x 2^depth grid
    // of leaves, which is how it is stored. The environment must outlive the index.
    class QuadIndex
    {
    public:
        QuadIndex(const Environment3D &env, int depth);

        int depth() const { return depth_; }
        int side() const { return side_; }
        std::size_t leaf_count() const { return leaves_.size(); }
        const Eigen::AlignedBox2d &rect() const { return rect_; }
        Eigen::AlignedBox2d leaf_rect(int ix, int iy) const;
        const std::vector<int> &leaf(int ix, int iy) const { return leaves_[static_cast<std::size_t>(iy * side_ + ix)]; }
        const Environment3D &environment() const { return *env_; }

        // Nearest physical obstacle along the ray. Obstacle `skip` is ignored for t <= skip_dist
        // (the surface the ray is leaving). Equal distances resolve to the lower obstacle id.
        std::optional<RayHit> first_hit(const Vec3 &origin, const Vec3 &dir, int skip = -1,
                                        double skip_dist = 1e-6) const;

        // All obstacles listed in the leaves the ray passes through (no early exit).
        std::vector<int> ray_candidates(const Vec3 &origin, const Vec3 &dir) const;

    private:
        template <typename Visit>
        void walk(const Vec3 &origin, const Vec3 &dir, Visit &&visit) const;

        const Environment3D *env_;
        int depth_;
        int side_;
        Eigen::AlignedBox2d rect_;
        Vec2 cell_size_;
        std::vector<std::vector<int>> leaves_;
    };

    QuadIndex build_quadindex(const Environment3D &env, int depth = 4);

    // O(n) oracle used to check the index.
    std::optional<RayHit> first_hit_bruteforce(const Environment3D &env, const Vec3 &origin, const Vec3 &dir,
                                               int skip = -1, double skip_dist = 1e-6);
} // namespace mmw

#endif
