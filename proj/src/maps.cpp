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

#include "mmw/maps.hpp"
#include "mmw/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mmw
{
    namespace
    {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        // Interval (lo, hi] indexing with the very first lower edge folded into cell 0.
        std::optional<int> interval_index(double x, double lo, double step, int n)
        {
            const double q = (x - lo) / step;
            if (!(q >= -1e-12 && q <= n * (1.0 + 1e-12)))
                return std::nullopt;
            return std::clamp(static_cast<int>(std::ceil(q)) - 1, 0, n - 1);
        }
    } // namespace

    MapGrid MapGrid::rect(int n1, int n2, const Eigen::AlignedBox2d &area)
    {
        if (n1 < 1 || n2 < 1)
            fail(ErrorKind::invalid_argument, "map grid needs n1, n2 >= 1");
        if (area.isEmpty() || !(area.volume() > 0.0))
            fail(ErrorKind::invalid_argument, "map grid area is empty");
        MapGrid g;
        g.shape_ = Shape::rect;
        g.n1_ = n1;
        g.n2_ = n2;
        g.area_ = area;
        return g;
    }

    MapGrid MapGrid::polar(int n_r, int n_ang, const Vec2 &center, double r_max)
    {
        if (n_r < 1 || n_ang < 1)
            fail(ErrorKind::invalid_argument, "map grid needs n1, n2 >= 1");
        if (!(r_max > 0.0))
            fail(ErrorKind::invalid_argument, "polar grid radius must be > 0");
        MapGrid g;
        g.shape_ = Shape::polar;
        g.n1_ = n_r;
        g.n2_ = n_ang;
        g.center_ = center;
        g.r_max_ = r_max;
        return g;
    }

    std::optional<std::size_t> MapGrid::locate(const Vec2 &p) const
    {
        std::optional<int> row, col;
        if (shape_ == Shape::rect)
        {
            row = interval_index(p.y(), area_.min().y(), area_.sizes().y() / n1_, n1_);
            col = interval_index(p.x(), area_.min().x(), area_.sizes().x() / n2_, n2_);
        }
        else
        {
            const Vec2 d = p - center_;
            row = interval_index(d.norm(), 0.0, r_max_ / n1_, n1_);
            double a = std::atan2(d.y(), d.x());
            if (a < 0.0)
                a += 2 * pi;
            col = interval_index(a, 0.0, 2 * pi / n2_, n2_);
        }
        if (!row || !col)
            return std::nullopt;
        return static_cast<std::size_t>(*row) * static_cast<std::size_t>(n2_) + static_cast<std::size_t>(*col);
    }

    Vec2 MapGrid::cell_center(std::size_t cell) const
    {
        const int row = static_cast<int>(cell / static_cast<std::size_t>(n2_));
        const int col = static_cast<int>(cell % static_cast<std::size_t>(n2_));
        if (shape_ == Shape::rect)
        {
            const Vec2 step(area_.sizes().x() / n2_, area_.sizes().y() / n1_);
            return area_.min() + Vec2((col + 0.5) * step.x(), (row + 0.5) * step.y());
        }
        const double r = (row + 0.5) * r_max_ / n1_, a = (col + 0.5) * 2 * pi / n2_;
        return center_ + r * Vec2(std::cos(a), std::sin(a));
    }

    double MapGrid::cell_area(std::size_t cell) const
    {
        if (shape_ == Shape::rect)
            return area_.volume() / static_cast<double>(cells());
        const int row = static_cast<int>(cell / static_cast<std::size_t>(n2_));
        const double r0 = row * r_max_ / n1_, r1 = (row + 1) * r_max_ / n1_;
        return pi * (r1 * r1 - r0 * r0) / n2_;
    }

    // ---------------------------------------------------------------------------------------------

    MapAccumulator::MapAccumulator(MapGrid grid, int antennas, DelayStatistic delay)
        : grid_(std::move(grid)), antennas_(antennas), delay_(delay)
    {
        if (antennas < 1)
            fail(ErrorKind::invalid_argument, "map accumulator needs at least one antenna");
        power_.assign(grid_.cells() * static_cast<std::size_t>(antennas), 0.0);
        count_.assign(grid_.cells(), 0);
        min_t_.assign(grid_.cells(), std::numeric_limits<double>::infinity());
        sum_t_.assign(grid_.cells(), 0.0);
        if (delay_ == DelayStatistic::mean_pairwise)
            times_.resize(grid_.cells());
    }

    void MapAccumulator::point(const MeasurementPoint &p)
    {
        const auto cell = grid_.locate(p.position.head<2>());
        if (!cell || p.antenna < 0 || p.antenna >= antennas_)
        {
            ++dropped_;
            return;
        }
        ++binned_;
        const std::size_t c = *cell;
        power_[c * static_cast<std::size_t>(antennas_) + static_cast<std::size_t>(p.antenna)] += p.power;
        ++count_[c];
        const double t = p.distance / speed_of_light;
        min_t_[c] = std::min(min_t_[c], t);
        sum_t_[c] += t;
        if (delay_ == DelayStatistic::mean_pairwise)
            times_[c].push_back(t);
    }

    void MapAccumulator::bin_points(std::span<const MeasurementPoint> points)
    {
        for (const auto &p : points)
            point(p);
    }

    double MapAccumulator::total_power(std::size_t cell) const
    {
        double s = 0;
        for (int a = 0; a < antennas_; ++a)
            s += power(cell, a);
        return s;
    }

    int MapAccumulator::best_antenna(std::size_t cell) const
    {
        if (count_[cell] == 0)
            return -1;
        int best = 0;
        for (int a = 1; a < antennas_; ++a)
            if (power(cell, a) > power(cell, best))
                best = a;
        return best;
    }

    double MapAccumulator::delay_spread_ns(std::size_t cell) const
    {
        const auto n = count_[cell];
        if (n == 0)
            return nan;
        if (delay_ == DelayStatistic::mean_excess)
            return std::max(0.0, sum_t_[cell] / static_cast<double>(n) - min_t_[cell]) * 1e9;
        auto t = times_[cell];
        if (t.size() < 2)
            return 0.0;
        std::sort(t.begin(), t.end());
        // sum over pairs of (t_k - t_j) from the sorted order
        double acc = 0, prefix = 0;
        for (std::size_t k = 0; k < t.size(); ++k)
        {
            acc += static_cast<double>(k) * t[k] - prefix;
            prefix += t[k];
        }
        const double pairs = 0.5 * static_cast<double>(t.size()) * static_cast<double>(t.size() - 1);
        return acc / pairs * 1e9;
    }

    // ---------------------------------------------------------------------------------------------

    namespace
    {
        MapMatrix blank(const MapGrid &g) { return MapMatrix::Constant(g.n1(), g.n2(), nan); }

        double &at(MapMatrix &m, const MapGrid &g, std::size_t cell)
        {
            return m(static_cast<Eigen::Index>(cell / static_cast<std::size_t>(g.n2())),
                     static_cast<Eigen::Index>(cell % static_cast<std::size_t>(g.n2())));
        }

        bool passes(double watts, std::optional<double> filter_dbm)
        {
            if (!(watts > 0.0))
                return false;
            return !filter_dbm || watts_to_dbm(watts) >= *filter_dbm;
        }
    } // namespace

    MapMatrix power_map(const MapAccumulator &acc, const std::vector<int> &antennas, std::optional<double> filter_dbm)
    {
        const auto &g = acc.grid();
        MapMatrix m = blank(g);
        for (std::size_t c = 0; c < g.cells(); ++c)
        {
            if (acc.count(c) == 0)
                continue;
            double p = 0;
            if (antennas.empty())
                p = acc.total_power(c);
            else
                for (int a : antennas)
                    p += acc.power(c, a);
            if (passes(p, filter_dbm))
                at(m, g, c) = watts_to_dbm(p);
        }
        return m;
    }

    MapMatrix sinr_map(const MapAccumulator &acc, double noise_w)
    {
        if (!(noise_w >= 0.0))
            fail(ErrorKind::invalid_argument, "noise power must be >= 0");
        if (acc.antennas() == 1 && noise_w == 0.0)
            fail(ErrorKind::invalid_argument, "SINR with a single antenna needs a positive noise power");
        const auto &g = acc.grid();
        MapMatrix m = blank(g);
        for (std::size_t c = 0; c < g.cells(); ++c)
        {
            if (acc.count(c) == 0)
                continue;
            const int best = acc.best_antenna(c);
            const double s = acc.power(c, best);
            const double i = acc.total_power(c) - s;
            at(m, g, c) = 10.0 * std::log10(s / (i + noise_w));
        }
        return m;
    }

    CoverageResult coverage_map(const MapAccumulator &acc, std::optional<double> filter_dbm)
    {
        const auto &g = acc.grid();
        CoverageResult res{blank(g), std::vector<double>(static_cast<std::size_t>(acc.antennas()), 0.0)};
        std::size_t filled = 0;
        for (std::size_t c = 0; c < g.cells(); ++c)
        {
            if (acc.count(c) == 0 || !passes(acc.total_power(c), filter_dbm))
                continue;
            const int best = acc.best_antenna(c);
            at(res.best, g, c) = best;
            res.fractions[static_cast<std::size_t>(best)] += 1.0;
            ++filled;
        }
        if (filled > 0)
            for (auto &f : res.fractions)
                f /= static_cast<double>(filled);
        return res;
    }

    double covered_fraction(const MapAccumulator &acc, std::optional<double> filter_dbm, std::optional<int> antenna)
    {
        const auto &g = acc.grid();
        std::size_t filled = 0;
        for (std::size_t c = 0; c < g.cells(); ++c)
        {
            if (acc.count(c) == 0)
                continue;
            const double p = antenna ? acc.power(c, *antenna) : acc.total_power(c);
            if (passes(p, filter_dbm))
                ++filled;
        }
        return static_cast<double>(filled) / static_cast<double>(g.cells());
    }

    MapMatrix delay_spread_map(const MapAccumulator &acc)
    {
        const auto &g = acc.grid();
        MapMatrix m = blank(g);
        for (std::size_t c = 0; c < g.cells(); ++c)
            at(m, g, c) = acc.delay_spread_ns(c);
        return m;
    }

    MapMatrix impacts_map(const MapAccumulator &acc)
    {
        const auto &g = acc.grid();
        MapMatrix m = blank(g);
        for (std::size_t c = 0; c < g.cells(); ++c)
            if (acc.count(c) > 0)
                at(m, g, c) = static_cast<double>(acc.count(c));
        return m;
    }

    // ---------------------------------------------------------------------------------------------

    LineOfSight los_classify(const Environment3D &env, const Vec3 &antenna, const Vec3 &point)
    {
        const Vec3 d = point - antenna;
        const double len = d.norm();
        if (len == 0.0)
            return LineOfSight::los;
        const auto hit = first_hit_bruteforce(env, antenna, d / len);
        return hit && hit->t < len * (1.0 - 1e-9) ? LineOfSight::nlos : LineOfSight::los;
    }

    LineOfSight los_classify(const QuadIndex &index, const Vec3 &antenna, const Vec3 &point)
    {
        const Vec3 d = point - antenna;
        const double len = d.norm();
        if (len == 0.0)
            return LineOfSight::los;
        const auto hit = index.first_hit(antenna, d / len);
        return hit && hit->t < len * (1.0 - 1e-9) ? LineOfSight::nlos : LineOfSight::los;
    }

    std::optional<RegressionFit> fit_line(std::span<const double> r, std::span<const double> pl)
    {
        if (r.size() != pl.size())
            fail(ErrorKind::invalid_argument, "fit_line: size mismatch");
        const auto n = static_cast<Eigen::Index>(r.size());
        if (n < 2)
            return std::nullopt;
        Eigen::MatrixXd a(n, 2);
        Eigen::VectorXd b(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            a(k, 0) = r[static_cast<std::size_t>(k)];
            a(k, 1) = 1.0;
            b(k) = pl[static_cast<std::size_t>(k)];
        }
        const auto qr = a.colPivHouseholderQr();
        if (qr.rank() < 2)
            return std::nullopt;
        const Eigen::Vector2d x = qr.solve(b);
        RegressionFit fit;
        fit.slope = x(0);
        fit.intercept = x(1);
        fit.count = r.size();
        fit.residual_rms = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n));
        return fit;
    }

    PathLossFits path_loss_fit(std::span<const PathLossSample> samples)
    {
        PathLossFits out;
        for (auto cls : {LineOfSight::los, LineOfSight::nlos})
        {
            std::vector<double> r, pl;
            for (const auto &s : samples)
                if (s.cls == cls)
                {
                    r.push_back(s.r);
                    pl.push_back(s.pl);
                }
            (cls == LineOfSight::los ? out.los : out.nlos) = fit_line(r, pl);
        }
        return out;
    }

    std::vector<PathLossSample> path_loss_samples(const MapAccumulator &acc, const QuadIndex &index,
                                                  const Antenna &antenna, int antenna_id, double h_m)
    {
        std::vector<PathLossSample> out;
        const auto &g = acc.grid();
        for (std::size_t c = 0; c < g.cells(); ++c)
        {
            const double p = acc.power(c, antenna_id);
            if (acc.count(c) == 0 || !(p > 0.0))
                continue;
            const Vec2 xy = g.cell_center(c);
            const Vec3 rx(xy.x(), xy.y(), h_m);
            PathLossSample s;
            s.r = (xy - antenna.position.head<2>()).norm();
            s.pl = 10.0 * std::log10(antenna.p0 / p);
            s.cls = los_classify(index, antenna.position, rx);
            out.push_back(s);
        }
        return out;
    }

    // ---------------------------------------------------------------------------------------------

    std::string map_csv(const MapMatrix &m, const std::string &kind, const std::string &units,
                        const std::string &extra_header)
    {
        std::ostringstream out;
        out << "# map=" << kind << " grid=" << m.rows() << 'x' << m.cols() << " units=" << units;
        if (!extra_header.empty())
            out << ' ' << extra_header;
        out << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
            for (Eigen::Index j = 0; j < m.cols(); ++j)
            {
                if (j)
                    out << ',';
                const double v = m(i, j);
                out << (std::isnan(v) ? std::string("NaN") : text::format_double(v));
            }
            out << '\n';
        }
        return out.str();
    }

    void write_map_csv(const std::filesystem::path &path, const MapMatrix &m, const std::string &kind,
                       const std::string &units, const std::string &extra_header)
    {
        text::write_file_atomic(path, map_csv(m, kind, units, extra_header));
    }

    std::string map_pgm(const MapMatrix &m, double lo, double hi, const std::string &comment)
    {
        if (!(hi > lo))
            fail(ErrorKind::invalid_argument, "heatmap range needs max > min");
        std::string out = "P5\n";
        if (!comment.empty())
            out += "# " + comment + "\n";
        out += std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
        // first row of the image is the top (largest y)
        for (Eigen::Index i = m.rows() - 1; i >= 0; --i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
            {
                const double v = m(i, j);
                unsigned char px = 0;
                if (!std::isnan(v))
                {
                    const double s = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
                    px = static_cast<unsigned char>(1 + std::lround(254.0 * s));
                }
                out.push_back(static_cast<char>(px));
            }
        return out;
    }

    void write_map_pgm(const std::filesystem::path &path, const MapMatrix &m, double lo, double hi,
                       const std::string &comment)
    {
        text::write_file_atomic(path, map_pgm(m, lo, hi, comment));
    }
} // namespace mmw
