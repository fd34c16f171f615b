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

#include "mmw/environment.hpp"
#include "mmw/textio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mmw
{
    std::string_view to_string(ObstacleKind kind)
    {
        switch (kind)
        {
        case ObstacleKind::floor:
            return "floor";
        case ObstacleKind::ceiling:
            return "ceiling";
        case ObstacleKind::outer_wall:
            return "outer_wall";
        case ObstacleKind::inner_wall:
            return "inner_wall";
        case ObstacleKind::measure:
            return "measure";
        }
        return "?";
    }

    std::optional<ObstacleKind> parse_obstacle_kind(std::string_view text)
    {
        for (auto k : {ObstacleKind::floor, ObstacleKind::ceiling, ObstacleKind::outer_wall,
                       ObstacleKind::inner_wall, ObstacleKind::measure})
            if (to_string(k) == text)
                return k;
        return std::nullopt;
    }

    Obstacle::Obstacle(ObstacleKind kind, std::string material, std::vector<Vec3> vertices)
        : kind_(kind), material_(std::move(material)), vertices_(std::move(vertices))
    {
        if (vertices_.size() < 3)
            fail(ErrorKind::format, "obstacle needs at least 3 vertices");
        // Newell's method is robust for any simple planar polygon.
        Vec3 n = Vec3::Zero();
        Vec3 centroid = Vec3::Zero();
        for (std::size_t i = 0, m = vertices_.size(); i < m; ++i)
        {
            const Vec3 &a = vertices_[i], &b = vertices_[(i + 1) % m];
            n += Vec3((a.y() - b.y()) * (a.z() + b.z()), (a.z() - b.z()) * (a.x() + b.x()),
                      (a.x() - b.x()) * (a.y() + b.y()));
            centroid += a;
            box_.extend(a);
        }
        if (!(n.norm() > 0.0))
            fail(ErrorKind::format, "degenerate obstacle polygon (zero area)");
        normal_ = n.normalized();
        centroid /= static_cast<double>(vertices_.size());
        offset_ = normal_.dot(centroid);
        normal_.cwiseAbs().maxCoeff(&drop_axis_);
        projected_.reserve(vertices_.size());
        for (const auto &v : vertices_)
            projected_.emplace_back(v[(drop_axis_ + 1) % 3], v[(drop_axis_ + 2) % 3]);
    }

    double Obstacle::planarity_error() const
    {
        double err = 0.0;
        for (const auto &v : vertices_)
            err = std::max(err, std::abs(normal_.dot(v) - offset_));
        return err;
    }

    std::optional<double> Obstacle::intersect(const Vec3 &origin, const Vec3 &dir) const
    {
        const double denom = normal_.dot(dir);
        if (std::abs(denom) < 1e-9)
            return std::nullopt;
        const double t = (offset_ - normal_.dot(origin)) / denom;
        if (!(t > 0.0))
            return std::nullopt;
        if (!contains(origin + t * dir))
            return std::nullopt;
        return t;
    }

    bool Obstacle::contains(const Vec3 &p, double tol) const
    {
        for (int a = 0; a < 3; ++a)
            if (p[a] < box_.min()[a] - tol || p[a] > box_.max()[a] + tol)
                return false;
        const Vec2 q(p[(drop_axis_ + 1) % 3], p[(drop_axis_ + 2) % 3]);
        bool inside = false;
        const std::size_t n = projected_.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Vec2 &a = projected_[i], &b = projected_[j];
            // boundary counts as inside
            const Vec2 e = b - a;
            const double len2 = e.squaredNorm();
            const double s = std::clamp(e.dot(q - a) / len2, 0.0, 1.0);
            if ((a + s * e - q).norm() <= tol)
                return true;
            if ((a.y() > q.y()) != (b.y() > q.y()) &&
                q.x() < (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x())
                inside = !inside;
        }
        return inside;
    }

    namespace
    {
        // Liang-Barsky test of a closed segment against a closed rectangle.
        bool segment_hits_rect(const Vec2 &a, const Vec2 &b, const Eigen::AlignedBox2d &r)
        {
            double t0 = 0.0, t1 = 1.0;
            const Vec2 d = b - a;
            for (int axis = 0; axis < 2; ++axis)
            {
                const double lo = r.min()[axis], hi = r.max()[axis];
                if (d[axis] == 0.0)
                {
                    if (a[axis] < lo || a[axis] > hi)
                        return false;
                    continue;
                }
                double ta = (lo - a[axis]) / d[axis], tb = (hi - a[axis]) / d[axis];
                if (ta > tb)
                    std::swap(ta, tb);
                t0 = std::max(t0, ta);
                t1 = std::min(t1, tb);
                if (t0 > t1)
                    return false;
            }
            return true;
        }

        bool point_in_footprint(const std::vector<Vec2> &poly, const Vec2 &q)
        {
            bool inside = false;
            for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
            {
                const Vec2 &a = poly[i], &b = poly[j];
                if ((a.y() > q.y()) != (b.y() > q.y()) &&
                    q.x() < (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x())
                    inside = !inside;
            }
            return inside;
        }
    } // namespace

    bool Obstacle::overlaps_xy(const Eigen::AlignedBox2d &rect) const
    {
        std::vector<Vec2> foot;
        foot.reserve(vertices_.size());
        for (const auto &v : vertices_)
            foot.emplace_back(v.x(), v.y());
        for (std::size_t i = 0; i < foot.size(); ++i)
            if (segment_hits_rect(foot[i], foot[(i + 1) % foot.size()], rect))
                return true;
        // rectangle entirely inside a horizontal footprint
        return std::abs(normal_.z()) > 1e-12 && point_in_footprint(foot, rect.center());
    }

    // ---------------------------------------------------------------------------------------------

    Eigen::AlignedBox3d Environment3D::bounds() const
    {
        Eigen::AlignedBox3d b;
        for (const auto &o : obstacles)
            if (o.physical())
                b.extend(o.box());
        return b;
    }

    void Environment3D::set_measurement_plane(double h_m)
    {
        std::erase_if(obstacles, [](const Obstacle &o) { return o.kind() == ObstacleKind::measure; });
        const auto b = bounds();
        if (b.isEmpty())
            fail(ErrorKind::invalid_argument, "measurement plane needs a non-empty environment");
        if (h_m < b.min().z() || h_m > b.max().z())
            fail(ErrorKind::invalid_argument, "measurement height outside the environment");
        const double x0 = b.min().x(), x1 = b.max().x(), y0 = b.min().y(), y1 = b.max().y();
        obstacles.emplace_back(ObstacleKind::measure, "-",
                               std::vector<Vec3>{{x0, y0, h_m}, {x1, y0, h_m}, {x1, y1, h_m}, {x0, y1, h_m}});
    }

    std::optional<double> Environment3D::measurement_height() const
    {
        for (const auto &o : obstacles)
            if (o.kind() == ObstacleKind::measure)
                return o.vertices().front().z();
        return std::nullopt;
    }

    std::size_t Environment3D::count(ObstacleKind kind) const
    {
        return static_cast<std::size_t>(
            std::count_if(obstacles.begin(), obstacles.end(), [&](const Obstacle &o) { return o.kind() == kind; }));
    }

    void Environment3D::validate() const
    {
        if (count(ObstacleKind::floor) != 1)
            fail(ErrorKind::format, "environment needs exactly one floor, found " + std::to_string(count(ObstacleKind::floor)));
        if (count(ObstacleKind::ceiling) != 1)
            fail(ErrorKind::format,
                 "environment needs exactly one ceiling, found " + std::to_string(count(ObstacleKind::ceiling)));
        for (std::size_t i = 0; i < obstacles.size(); ++i)
        {
            const auto &o = obstacles[i];
            if (o.planarity_error() > 1e-9)
                fail(ErrorKind::format, "obstacle " + std::to_string(i) + " is not coplanar");
            if (o.kind() == ObstacleKind::measure)
            {
                if (o.material() != "-")
                    fail(ErrorKind::format, "measurement plane carries no material");
                if (std::abs(o.normal().z()) < 1.0 - 1e-12)
                    fail(ErrorKind::format, "measurement plane must be horizontal");
                continue;
            }
            if (!materials.contains(o.material()))
                fail(ErrorKind::format, "unknown material_id '" + o.material() + "'");
        }
    }

    // ---------------------------------------------------------------------------------------------

    Environment3D parse_environment(std::istream &in, const std::string &source)
    {
        Environment3D env;
        std::string line;
        int line_no = 0;
        std::vector<std::pair<int, std::string>> material_refs;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
            auto tokens = text::split_ws(text::strip_comment(line));
            if (tokens.empty())
                continue;
            try
            {
                if (tokens[0] == "material")
                {
                    if (tokens.size() != 6)
                        fail(ErrorKind::format, "material expects <id> <sigma0> <tau> <n_re> <n_im>");
                    Material m;
                    m.sigma0 = text::parse_double(tokens[2]);
                    m.tau = text::parse_double(tokens[3]);
                    m.n_re = text::parse_double(tokens[4]);
                    m.n_im = text::parse_double(tokens[5]);
                    m.validate();
                    if (!env.materials.emplace(std::string(tokens[1]), m).second)
                        fail(ErrorKind::format, "duplicate material '" + std::string(tokens[1]) + "'");
                }
                else if (tokens[0] == "obstacle")
                {
                    if (tokens.size() < 4)
                        fail(ErrorKind::format, "obstacle expects <kind> <material_id> <n_vertices> coordinates");
                    const auto kind = parse_obstacle_kind(tokens[1]);
                    if (!kind)
                        fail(ErrorKind::format, "unknown obstacle kind '" + std::string(tokens[1]) + "'");
                    const long n = text::parse_int(tokens[3]);
                    if (n < 3)
                        fail(ErrorKind::format, "obstacle needs at least 3 vertices");
                    if (tokens.size() != 4 + 3 * static_cast<std::size_t>(n))
                        fail(ErrorKind::format, "expected " + std::to_string(3 * n) + " coordinates, got " +
                                                    std::to_string(tokens.size() - 4));
                    std::vector<Vec3> verts;
                    for (long k = 0; k < n; ++k)
                        verts.emplace_back(text::parse_double(tokens[4 + 3 * k]), text::parse_double(tokens[5 + 3 * k]),
                                           text::parse_double(tokens[6 + 3 * k]));
                    env.obstacles.emplace_back(*kind, std::string(tokens[2]), std::move(verts));
                    if (env.obstacles.back().planarity_error() > 1e-9)
                        fail(ErrorKind::format, "non-coplanar polygon");
                    material_refs.emplace_back(line_no, std::string(tokens[2]));
                }
                else
                    fail(ErrorKind::format, "unknown record '" + std::string(tokens[0]) + "'");
            }
            catch (const Error &e)
            {
                throw Error(e.kind(), where() + e.what());
            }
        }
        for (std::size_t i = 0; i < env.obstacles.size(); ++i)
        {
            const auto &o = env.obstacles[i];
            if (o.kind() != ObstacleKind::measure && !env.materials.contains(o.material()))
                fail(ErrorKind::format, source + ":" + std::to_string(material_refs[i].first) +
                                            ": unknown material_id '" + o.material() + "'");
        }
        env.validate();
        return env;
    }

    Environment3D load_custom(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::io, "cannot open environment file " + path.string());
        return parse_environment(in, path.string());
    }

    void write_environment(std::ostream &out, const Environment3D &env, std::string_view header)
    {
        if (!header.empty())
        {
            std::istringstream lines{std::string(header)};
            std::string l;
            while (std::getline(lines, l))
                out << "# " << l << '\n';
        }
        for (const auto &[id, m] : env.materials)
            out << "material " << id << ' ' << text::format_double(m.sigma0) << ' ' << text::format_double(m.tau) << ' '
                << text::format_double(m.n_re) << ' ' << text::format_double(m.n_im) << '\n';
        for (const auto &o : env.obstacles)
        {
            out << "obstacle " << to_string(o.kind()) << ' ' << o.material() << ' ' << o.vertices().size();
            for (const auto &v : o.vertices())
                out << ' ' << text::format_double(v.x()) << ' ' << text::format_double(v.y()) << ' '
                    << text::format_double(v.z());
            out << '\n';
        }
    }

    void save_environment(const std::filesystem::path &path, const Environment3D &env, std::string_view header)
    {
        std::ostringstream buffer;
        write_environment(buffer, env, header);
        text::write_file_atomic(path, buffer.str());
    }
} // namespace mmw
