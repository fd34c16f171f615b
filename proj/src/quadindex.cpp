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

#include "mmw/quadindex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace mmw
{
    namespace
    {
        constexpr double inf = std::numeric_limits<double>::infinity();

        // Keeps the better of two hits: nearer, or lower id at equal distance.
        inline void consider(std::optional<RayHit> &best, int id, double t)
        {
            if (!best || t < best->t || (t == best->t && id < best->obstacle))
            {
                if (!best)
                    best.emplace();
                best->obstacle = id;
                best->t = t;
            }
        }

        inline std::optional<double> hit_param(const Obstacle &o, int id, const Vec3 &origin, const Vec3 &dir, int skip,
                                               double skip_dist)
        {
            auto t = o.intersect(origin, dir);
            if (t && id == skip && *t <= skip_dist)
                return std::nullopt;
            return t;
        }

        // Per-thread visit stamps so an obstacle listed in several leaves is tested once.
        struct Mailbox
        {
            std::vector<std::uint64_t> stamp;
            std::uint64_t current = 0;

            void begin(std::size_t n)
            {
                if (stamp.size() < n)
                    stamp.resize(n, 0);
                ++current;
            }
            bool first_visit(int id)
            {
                auto &s = stamp[static_cast<std::size_t>(id)];
                if (s == current)
                    return false;
                s = current;
                return true;
            }
        };
        thread_local Mailbox mailbox;
    } // namespace

    QuadIndex::QuadIndex(const Environment3D &env, int depth) : env_(&env), depth_(depth)
    {
        if (depth < 0 || depth > 12)
            fail(ErrorKind::invalid_argument, "quad index depth must be in [0, 12]");
        side_ = 1 << depth;
        const auto b = env.bounds();
        if (b.isEmpty())
            fail(ErrorKind::invalid_argument, "cannot index an empty environment");
        rect_ = Eigen::AlignedBox2d(b.min().head<2>(), b.max().head<2>());
        cell_size_ = rect_.sizes() / static_cast<double>(side_);
        leaves_.resize(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_));
        for (int id = 0; id < static_cast<int>(env.obstacles.size()); ++id)
        {
            const auto &o = env.obstacles[static_cast<std::size_t>(id)];
            if (!o.physical())
                continue;
            // candidate leaves from the bounding box, then the exact footprint test
            const auto lo = ((o.box().min().head<2>() - rect_.min()).array() / cell_size_.array()).floor();
            const auto hi = ((o.box().max().head<2>() - rect_.min()).array() / cell_size_.array()).floor();
            const int x0 = std::clamp(static_cast<int>(lo.x()) - 1, 0, side_ - 1);
            const int y0 = std::clamp(static_cast<int>(lo.y()) - 1, 0, side_ - 1);
            const int x1 = std::clamp(static_cast<int>(hi.x()) + 1, 0, side_ - 1);
            const int y1 = std::clamp(static_cast<int>(hi.y()) + 1, 0, side_ - 1);
            for (int iy = y0; iy <= y1; ++iy)
                for (int ix = x0; ix <= x1; ++ix)
                    if (o.overlaps_xy(leaf_rect(ix, iy)))
                        leaves_[static_cast<std::size_t>(iy * side_ + ix)].push_back(id);
        }
    }

    Eigen::AlignedBox2d QuadIndex::leaf_rect(int ix, int iy) const
    {
        const Vec2 lo = rect_.min() + Vec2(ix * cell_size_.x(), iy * cell_size_.y());
        // the last row/column ends exactly on the bounds
        const Vec2 hi(ix + 1 == side_ ? rect_.max().x() : lo.x() + cell_size_.x(),
                      iy + 1 == side_ ? rect_.max().y() : lo.y() + cell_size_.y());
        return {lo, hi};
    }

    // Visits leaves in ray order. visit(leaf, t_exit) returns false to stop.
    template <typename Visit>
    void QuadIndex::walk(const Vec3 &origin, const Vec3 &dir, Visit &&visit) const
    {
        const Vec2 o = origin.head<2>(), d = dir.head<2>();
        double t0 = 0.0, t1 = inf;
        for (int a = 0; a < 2; ++a)
        {
            if (std::abs(d[a]) < 1e-300)
            {
                if (o[a] < rect_.min()[a] || o[a] > rect_.max()[a])
                    return;
                continue;
            }
            double ta = (rect_.min()[a] - o[a]) / d[a], tb = (rect_.max()[a] - o[a]) / d[a];
            if (ta > tb)
                std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
        if (t0 > t1)
            return;

        const Vec2 p = o + t0 * d;
        int ix = std::clamp(static_cast<int>(std::floor((p.x() - rect_.min().x()) / cell_size_.x())), 0, side_ - 1);
        int iy = std::clamp(static_cast<int>(std::floor((p.y() - rect_.min().y()) / cell_size_.y())), 0, side_ - 1);
        const int step_x = d.x() > 0 ? 1 : -1, step_y = d.y() > 0 ? 1 : -1;
        auto next_boundary = [&](int a, int i) -> double {
            if (std::abs(d[a]) < 1e-300)
                return inf;
            const double edge = rect_.min()[a] + (d[a] > 0 ? i + 1 : i) * cell_size_[a];
            return (edge - o[a]) / d[a];
        };
        double tmx = next_boundary(0, ix), tmy = next_boundary(1, iy);
        const double dx = std::abs(d.x()) < 1e-300 ? inf : cell_size_.x() / std::abs(d.x());
        const double dy = std::abs(d.y()) < 1e-300 ? inf : cell_size_.y() / std::abs(d.y());
        while (true)
        {
            const double t_exit = std::min({tmx, tmy, t1});
            if (!visit(leaves_[static_cast<std::size_t>(iy * side_ + ix)], t_exit))
                return;
            if (t_exit >= t1)
                return;
            if (tmx < tmy)
            {
                ix += step_x;
                tmx += dx;
            }
            else
            {
                iy += step_y;
                tmy += dy;
            }
            if (ix < 0 || iy < 0 || ix >= side_ || iy >= side_)
                return;
        }
    }

    std::optional<RayHit> QuadIndex::first_hit(const Vec3 &origin, const Vec3 &dir, int skip, double skip_dist) const
    {
        std::optional<RayHit> best;
        mailbox.begin(env_->obstacles.size());
        walk(origin, dir, [&](const std::vector<int> &ids, double t_exit) {
            for (int id : ids)
            {
                if (!mailbox.first_visit(id))
                    continue;
                if (auto t = hit_param(env_->obstacles[static_cast<std::size_t>(id)], id, origin, dir, skip, skip_dist))
                    consider(best, id, *t);
            }
            // a hit inside this leaf cannot be beaten by anything further along
            return !(best && best->t < t_exit * (1.0 - 1e-12));
        });
        if (best)
            best->point = origin + best->t * dir;
        return best;
    }

    std::vector<int> QuadIndex::ray_candidates(const Vec3 &origin, const Vec3 &dir) const
    {
        std::vector<int> out;
        walk(origin, dir, [&](const std::vector<int> &ids, double) {
            out.insert(out.end(), ids.begin(), ids.end());
            return true;
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    QuadIndex build_quadindex(const Environment3D &env, int depth) { return QuadIndex(env, depth); }

    std::optional<RayHit> first_hit_bruteforce(const Environment3D &env, const Vec3 &origin, const Vec3 &dir, int skip,
                                               double skip_dist)
    {
        std::optional<RayHit> best;
        for (int id = 0; id < static_cast<int>(env.obstacles.size()); ++id)
        {
            const auto &o = env.obstacles[static_cast<std::size_t>(id)];
            if (!o.physical())
                continue;
            if (auto t = hit_param(o, id, origin, dir, skip, skip_dist))
                consider(best, id, *t);
        }
        if (best)
            best->point = origin + best->t * dir;
        return best;
    }
} // namespace mmw
