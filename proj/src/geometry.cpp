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

#include "mmw/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mmw
{
    namespace
    {
        double scale_of(const Cell &c)
        {
            double s = 0.0;
            for (const auto &v : c.vertices)
                s = std::max(s, v.cwiseAbs().maxCoeff());
            return std::max(s, 1.0);
        }

        // Drops repeated vertices; the surviving vertex keeps the tag of the edge that
        // actually has length.
        void remove_duplicates(Cell &c, double tol)
        {
            if (c.vertices.size() < 2)
                return;
            Cell out;
            const std::size_t n = c.vertices.size();
            for (std::size_t i = 0; i < n; ++i)
            {
                const Vec2 &next = c.vertices[(i + 1) % n];
                if ((next - c.vertices[i]).norm() <= tol)
                    continue;
                out.vertices.push_back(c.vertices[i]);
                out.tags.push_back(c.tags[i]);
            }
            c = std::move(out);
        }
    } // namespace

    bool is_convex(const Cell &c, double angle_tol)
    {
        const std::size_t n = c.size();
        if (n < 3)
            return false;
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 e0 = c.vertices[(i + 1) % n] - c.vertices[i];
            const Vec2 e1 = c.vertices[(i + 2) % n] - c.vertices[(i + 1) % n];
            // turning angle must be >= -tol for a counter-clockwise convex ring
            const double turn = std::atan2(cross2<double>(e0, e1), e0.dot(e1));
            if (turn < -angle_tol)
                return false;
        }
        return signed_area<double>(c.vertices) > 0.0;
    }

    std::pair<double, double> projection_range(const Cell &c, const Vec2 &normal)
    {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto &v : c.vertices)
        {
            const double p = normal.dot(v);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        return {lo, hi};
    }

    double projection_width(const Cell &c, const Vec2 &normal)
    {
        const auto [lo, hi] = projection_range(c, normal);
        return hi - lo;
    }

    double diameter(const Cell &c)
    {
        double d = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                d = std::max(d, (c.vertices[i] - c.vertices[j]).norm());
        return d;
    }

    Cell clip(const Cell &c, const Line &line, int chord_tag)
    {
        const std::size_t n = c.size();
        const double eps = 1e-12 * scale_of(c);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            s[i] = line.signed_distance(c.vertices[i]);
            if (std::abs(s[i]) <= eps)
                s[i] = 0.0;
        }

        Cell out;
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t j = (i + 1) % n;
            const Vec2 &cur = c.vertices[i], &nxt = c.vertices[j];
            if (s[i] >= 0.0)
            {
                // leaving the kept side from a point on the line walks along the chord
                const bool leaves_on_line = s[i] == 0.0 && s[j] < 0.0;
                out.vertices.push_back(cur);
                out.tags.push_back(leaves_on_line ? chord_tag : c.tags[i]);
                if (s[i] > 0.0 && s[j] < 0.0)
                {
                    const double t = s[i] / (s[i] - s[j]);
                    out.vertices.push_back(cur + t * (nxt - cur));
                    out.tags.push_back(chord_tag);
                }
            }
            else if (s[j] > 0.0)
            {
                const double t = s[i] / (s[i] - s[j]);
                out.vertices.push_back(cur + t * (nxt - cur));
                out.tags.push_back(c.tags[i]);
            }
        }
        remove_duplicates(out, eps);
        if (out.size() < 3 || signed_area<double>(out.vertices) <= eps * eps)
            return {};
        return out;
    }

    std::optional<Split> split(const Cell &c, const Line &line, int chord_tag)
    {
        const double eps = 1e-12 * scale_of(c);
        bool pos = false, neg = false;
        for (const auto &v : c.vertices)
        {
            const double d = line.signed_distance(v);
            pos |= d > eps;
            neg |= d < -eps;
        }
        if (!pos || !neg)
            return std::nullopt;

        Split out;
        out.positive = clip(c, line, chord_tag);
        out.negative = clip(c, Line{-line.normal, -line.offset}, chord_tag);
        if (out.positive.empty() || out.negative.empty())
            return std::nullopt;

        // The chord is the single chord-tagged edge of the positive part.
        const Cell &p = out.positive;
        const std::size_t n = p.size();
        for (std::size_t k = 0; k < n; ++k)
        {
            if (p.tags[k] != chord_tag)
                continue;
            out.chord = {p.vertices[k], p.vertices[(k + 1) % n]};
            out.tag_a = p.tags[(k + n - 1) % n];
            out.tag_b = p.tags[(k + 1) % n];
            break;
        }
        return out;
    }

    Cell regular_polygon(int sides, double radius)
    {
        if (sides < 3)
            fail(ErrorKind::invalid_argument, "polygon needs at least 3 sides, got " + std::to_string(sides));
        if (!(radius > 0.0) || !std::isfinite(radius))
            fail(ErrorKind::invalid_argument, "polygon radius must be positive");
        Cell c;
        // Offset by half a sector so that squares come out axis-aligned.
        for (int k = 0; k < sides; ++k)
        {
            const double a = pi / sides + 2.0 * pi * k / sides;
            c.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
            c.tags.push_back(boundary_tag);
        }
        return c;
    }

    bool contains_strictly(const Cell &c, const Vec2 &x, double margin)
    {
        for (std::size_t k = 0; k < c.size(); ++k)
        {
            const Vec2 e = c.edge_end(k) - c.edge_start(k);
            const double len = e.norm();
            if (cross2<double>(e, Vec2(x - c.edge_start(k))) / len <= margin)
                return false;
        }
        return true;
    }

    // ---------------------------------------------------------------------------------------------

    double DirectionLaw::axis_weight() const
    {
        switch (mode)
        {
        case Mode::isotropic:
            return 0.0;
        case Mode::axis_pair:
            return 1.0;
        case Mode::mixture:
            return alpha;
        case Mode::single:
            return 0.0;
        }
        return 0.0;
    }

    void DirectionLaw::validate() const
    {
        if (mode == Mode::mixture && !(alpha >= 0.0 && alpha <= 1.0))
            fail(ErrorKind::invalid_argument, "anisotropy alpha must lie in [0, 1]");
    }

    double anisotropy_xi(const DirectionLaw &law)
    {
        law.validate();
        if (law.mode == DirectionLaw::Mode::single)
            return 0.0;
        // Uniform pairs average |sin| to 2/pi, uniform-vs-atom pairs as well, atom pairs give
        // 1/2 (orthogonal with probability 1/2).
        const double a = law.axis_weight();
        return (2.0 / pi) * (1.0 - a * a) + 0.5 * a * a;
    }

    double TessellationParams::resolved_edge_density() const
    {
        switch (reference)
        {
        case MorphologyReference::edge_density:
            return edge_density;
        case MorphologyReference::mean_area:
        {
            if (!(reference_value > 0.0))
                fail(ErrorKind::invalid_argument, "mean cell area must be positive");
            return std::sqrt(2.0 / (reference_value * anisotropy_xi(law)));
        }
        case MorphologyReference::mean_perimeter:
        {
            if (!(reference_value > 0.0))
                fail(ErrorKind::invalid_argument, "mean cell perimeter must be positive");
            return 4.0 / (reference_value * anisotropy_xi(law));
        }
        }
        return edge_density;
    }

    // ---------------------------------------------------------------------------------------------

    LineMeasure::LineMeasure(DirectionLaw law, double tilt) : law_(law), tilt_(tilt) { law_.validate(); }

    namespace
    {
        double width_at(const Cell &c, double theta)
        {
            return projection_width(c, Vec2(-std::sin(theta), std::cos(theta)));
        }
    } // namespace

    double LineMeasure::hitting_mass(const Cell &c) const
    {
        if (law_.mode == DirectionLaw::Mode::single)
            return width_at(c, tilt_);
        const double a = law_.axis_weight();
        double mass = 0.0;
        if (a > 0.0)
            mass += a * 0.5 * (width_at(c, tilt_) + width_at(c, tilt_ + pi / 2));
        if (a < 1.0)
            mass += (1.0 - a) * perimeter(c) / pi; // Cauchy: mean width = perimeter / pi
        return mass;
    }

    Line LineMeasure::sample_hitting(const Cell &c, std::mt19937_64 &rng) const
    {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double theta = tilt_;
        if (law_.mode != DirectionLaw::Mode::single)
        {
            const double a = law_.axis_weight();
            const double w0 = width_at(c, tilt_), w1 = width_at(c, tilt_ + pi / 2);
            const double atoms = a * 0.5 * (w0 + w1);
            const double uniform = (1.0 - a) * perimeter(c) / pi;
            if (u01(rng) * (atoms + uniform) < atoms)
            {
                theta = u01(rng) * (w0 + w1) < w0 ? tilt_ : tilt_ + pi / 2;
            }
            else
            {
                const double wmax = diameter(c);
                std::uniform_real_distribution<double> angle(0.0, pi);
                do
                    theta = tilt_ + angle(rng);
                while (u01(rng) * wmax > width_at(c, theta));
            }
        }
        const Line probe = Line::from_direction(theta, 0.0);
        const auto [lo, hi] = projection_range(c, probe.normal);
        std::uniform_real_distribution<double> offset(lo, hi);
        return Line{probe.normal, offset(rng)};
    }

    // ---------------------------------------------------------------------------------------------

    namespace
    {
        void check_window(const Cell &window, const TessellationParams &params)
        {
            if (window.empty() || !(area(window) > 0.0))
                fail(ErrorKind::invalid_argument, "tessellation window has zero area");
            if (!is_convex(window, 1e-9))
                fail(ErrorKind::invalid_argument, "tessellation window must be convex and counter-clockwise");
            const double la = params.resolved_edge_density();
            if (!(la >= 0.0) || !std::isfinite(la))
                fail(ErrorKind::invalid_argument, "edge length density must be non-negative and finite");
        }

        Tessellation empty_tessellation(const Cell &window, const TessellationParams &params, Topology topo)
        {
            Tessellation t;
            t.topology = topo;
            t.edge_density = params.resolved_edge_density();
            t.xi = anisotropy_xi(params.law);
            t.window = window;
            for (auto &tag : t.window.tags)
                tag = boundary_tag;
            return t;
        }
    } // namespace

    Tessellation sample_plt(const Cell &window, const TessellationParams &params)
    {
        check_window(window, params);
        Tessellation t = empty_tessellation(window, params, Topology::plt);
        std::mt19937_64 rng(params.seed);
        const LineMeasure measure(params.law, params.tilt);

        // Lines hitting the window form a Poisson process of mean L_A times the hitting mass.
        const double mean_lines = t.edge_density * measure.hitting_mass(t.window);
        std::poisson_distribution<long> count(mean_lines);
        const long n_lines = mean_lines > 0.0 ? count(rng) : 0;

        std::vector<Line> lines;
        lines.reserve(static_cast<std::size_t>(n_lines));
        t.cells.push_back(t.window);
        for (long i = 0; i < n_lines; ++i)
        {
            const Line line = measure.sample_hitting(t.window, rng);
            const int id = static_cast<int>(t.segments.size());
            const auto chord = split(t.window, line, id);
            if (!chord)
                continue; // tangent to the window, measure zero
            t.segments.push_back(chord->chord);
            lines.push_back(line);

            std::vector<Cell> next;
            next.reserve(t.cells.size() + 8);
            for (auto &cell : t.cells)
            {
                if (auto parts = split(cell, line, id))
                {
                    next.push_back(std::move(parts->positive));
                    next.push_back(std::move(parts->negative));
                }
                else
                    next.push_back(std::move(cell));
            }
            t.cells = std::move(next);
        }

        // Every pair of lines crossing inside the window gives an X vertex.
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (std::size_t j = i + 1; j < lines.size(); ++j)
            {
                Eigen::Matrix2d m;
                m << lines[i].normal.transpose(), lines[j].normal.transpose();
                const double det = m.determinant();
                if (std::abs(det) < 1e-14)
                    continue;
                const Vec2 x = m.inverse() * Vec2(lines[i].offset, lines[j].offset);
                if (contains_strictly(t.window, x))
                    t.vertices.push_back({x, 4});
            }
        return t;
    }

    Tessellation sample_stit(const Cell &window, const TessellationParams &params)
    {
        check_window(window, params);
        Tessellation t = empty_tessellation(window, params, Topology::stit);
        std::mt19937_64 rng(params.seed);
        const LineMeasure measure(params.law, params.tilt);
        // The driving measure has unit length intensity, so the stopping time equals L_A.
        const double t_stop = t.edge_density;

        struct Live
        {
            Cell cell;
            double birth;
        };
        std::vector<Live> stack;
        stack.push_back({t.window, 0.0});
        while (!stack.empty())
        {
            Live live = std::move(stack.back());
            stack.pop_back();
            const double rate = measure.hitting_mass(live.cell);
            if (!(rate > 0.0))
            {
                t.cells.push_back(std::move(live.cell));
                continue;
            }
            std::exponential_distribution<double> lifetime(rate);
            const double death = live.birth + lifetime(rng);
            if (death >= t_stop)
            {
                t.cells.push_back(std::move(live.cell));
                continue;
            }

            const int id = static_cast<int>(t.segments.size());
            std::optional<Split> parts;
            for (int attempt = 0; attempt < 16 && !parts; ++attempt)
                parts = split(live.cell, measure.sample_hitting(live.cell, rng), id);
            if (!parts)
            {
                t.cells.push_back(std::move(live.cell));
                continue;
            }
            t.segments.push_back(parts->chord);
            // Chord ends landing on an earlier chord form T vertices.
            if (parts->tag_a != boundary_tag)
                t.vertices.push_back({parts->chord.a, 3});
            if (parts->tag_b != boundary_tag)
                t.vertices.push_back({parts->chord.b, 3});
            stack.push_back({std::move(parts->negative), death});
            stack.push_back({std::move(parts->positive), death});
        }
        return t;
    }

    Tessellation sample_tessellation(const Cell &window, const TessellationParams &params)
    {
        return params.topology == Topology::plt ? sample_plt(window, params) : sample_stit(window, params);
    }

    // ---------------------------------------------------------------------------------------------

    namespace
    {
        // Lowest corner in (y, x) lexicographic order with a tolerance on y.
        std::size_t lowest_corner(const Cell &c)
        {
            const double tol = 1e-9 * scale_of(c);
            std::size_t best = 0;
            for (std::size_t i = 1; i < c.size(); ++i)
            {
                const Vec2 &v = c.vertices[i], &b = c.vertices[best];
                if (v.y() < b.y() - tol || (std::abs(v.y() - b.y()) <= tol && v.x() < b.x()))
                    best = i;
            }
            return best;
        }
    } // namespace

    MorphStats morphology_stats(const Tessellation &tess, const Cell &window, EdgeCorrection correction)
    {
        MorphStats s;
        s.window_area = area(window);
        for (const auto &seg : tess.segments)
            s.total_edge_length += seg.length();

        double degree_sum = 0.0;
        for (const auto &v : tess.vertices)
        {
            if (correction == EdgeCorrection::minus_sampling && !contains_strictly(window, v.position))
                continue;
            s.vertex_count += 1.0;
            degree_sum += v.degree;
        }
        s.edge_count = degree_sum / 2.0;
        if (correction == EdgeCorrection::none)
        {
            // Graph edges inside the window: a degree-d vertex cuts the segments through it
            // into d - 2 extra pieces.
            s.edge_count = static_cast<double>(tess.segments.size()) + degree_sum -
                           2.0 * static_cast<double>(tess.vertices.size());
        }

        for (const auto &cell : tess.cells)
        {
            if (correction == EdgeCorrection::none)
            {
                s.cell_count += 1.0;
                s.perimeter_sum += perimeter(cell);
                continue;
            }
            const std::size_t k = lowest_corner(cell);
            const std::size_t n = cell.size();
            if (cell.tags[k] != boundary_tag && cell.tags[(k + n - 1) % n] != boundary_tag)
                s.cell_count += 1.0;
        }
        if (correction == EdgeCorrection::minus_sampling)
            s.perimeter_sum = 2.0 * s.total_edge_length; // every edge borders two cells

        const MorphStats parts[] = {s};
        return pool_morphology(parts);
    }

    MorphStats pool_morphology(std::span<const MorphStats> parts)
    {
        MorphStats s;
        for (const auto &p : parts)
        {
            s.window_area += p.window_area;
            s.total_edge_length += p.total_edge_length;
            s.vertex_count += p.vertex_count;
            s.edge_count += p.edge_count;
            s.cell_count += p.cell_count;
            s.perimeter_sum += p.perimeter_sum;
        }
        if (s.window_area > 0.0)
        {
            s.edge_length_density = s.total_edge_length / s.window_area;
            s.vertex_density = s.vertex_count / s.window_area;
            s.edge_density = s.edge_count / s.window_area;
            s.cell_density = s.cell_count / s.window_area;
        }
        if (s.edge_count > 0.0)
            s.typical_edge_length = s.total_edge_length / s.edge_count;
        if (s.cell_count > 0.0)
        {
            s.typical_cell_perimeter = s.perimeter_sum / s.cell_count;
            s.typical_cell_area = s.window_area / s.cell_count;
        }
        return s;
    }

    MorphStats expected_morphology(Topology topology, double edge_density, double xi)
    {
        if (!(edge_density > 0.0) || !std::isfinite(edge_density))
            fail(ErrorKind::invalid_argument, "edge length density must be positive");
        if (!(xi > 0.0 && xi <= 1.0))
            fail(ErrorKind::invalid_argument, "anisotropy xi must lie in (0, 1]");
        const double l2x = edge_density * edge_density * xi;
        MorphStats s;
        s.edge_length_density = edge_density;
        s.vertex_density = topology == Topology::plt ? 0.5 * l2x : l2x;
        s.edge_density = topology == Topology::plt ? l2x : 1.5 * l2x;
        s.cell_density = 0.5 * l2x;
        s.typical_edge_length = 2.0 / (3.0 * edge_density * xi);
        s.typical_cell_perimeter = 4.0 / (edge_density * xi);
        s.typical_cell_area = 2.0 / l2x;
        return s;
    }
} // namespace mmw
