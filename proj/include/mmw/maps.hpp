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

#ifndef MMW_MAPS_HPP
#define MMW_MAPS_HPP

#include "mmw/propagation.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmw
{
    // Rectangular grid: n1 rows along y, n2 columns along x.
    // Polar grid: n1 radial rings out to r_max, n2 angular sectors counter-clockwise from +x.
    // Cells are intervals (lo, hi]; points on the outer-most lower edge go to cell 0.
    class MapGrid
    {
    public:
        enum class Shape
        {
            rect,
            polar
        };

        static MapGrid rect(int n1, int n2, const Eigen::AlignedBox2d &area);
        static MapGrid polar(int n_r, int n_ang, const Vec2 &center, double r_max);

        Shape shape() const { return shape_; }
        int n1() const { return n1_; }
        int n2() const { return n2_; }
        std::size_t cells() const { return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_); }

        // Linear cell index (row-major) or nullopt outside the grid.
        std::optional<std::size_t> locate(const Vec2 &p) const;
        Vec2 cell_center(std::size_t cell) const;
        double cell_area(std::size_t cell) const;

    private:
        Shape shape_ = Shape::rect;
        int n1_ = 1, n2_ = 1;
        Eigen::AlignedBox2d area_;
        Vec2 center_ = Vec2::Zero();
        double r_max_ = 0;
    };

    enum class DelayStatistic
    {
        mean_excess,  // mean over points of t - min t
        mean_pairwise // mean |t_a - t_b| over distinct pairs
    };

    // Streaming per-cell aggregation of measurement points (a PointSink).
    class MapAccumulator : public PointSink
    {
    public:
        MapAccumulator(MapGrid grid, int antennas, DelayStatistic delay = DelayStatistic::mean_excess);

        void point(const MeasurementPoint &p) override;
        void bin_points(std::span<const MeasurementPoint> points);

        const MapGrid &grid() const { return grid_; }
        int antennas() const { return antennas_; }
        std::size_t binned() const { return binned_; }
        std::size_t dropped() const { return dropped_; }

        std::uint64_t count(std::size_t cell) const { return count_[cell]; }
        double power(std::size_t cell, int antenna) const
        {
            return power_[cell * static_cast<std::size_t>(antennas_) + static_cast<std::size_t>(antenna)];
        }
        double total_power(std::size_t cell) const;
        // Lowest id among the antennas with the largest power; -1 for an empty cell.
        int best_antenna(std::size_t cell) const;
        // Delay statistic in ns; NaN for an empty cell.
        double delay_spread_ns(std::size_t cell) const;

    private:
        MapGrid grid_;
        int antennas_;
        DelayStatistic delay_;
        std::vector<double> power_;
        std::vector<std::uint64_t> count_;
        std::vector<double> min_t_, sum_t_;
        std::vector<std::vector<double>> times_; // mean_pairwise only
        std::size_t binned_ = 0, dropped_ = 0;
    };

    using MapMatrix = Eigen::MatrixXd; // NaN marks no data

    inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

    // Thermal noise k T B.
    inline double thermal_noise(double bandwidth_hz, double temperature_k = 290.0)
    {
        return boltzmann * temperature_k * bandwidth_hz;
    }

    // dBm of the summed power of the selected antennas (all when empty). Cells below the
    // optional filter are masked.
    MapMatrix power_map(const MapAccumulator &acc, const std::vector<int> &antennas = {},
                        std::optional<double> filter_dbm = std::nullopt);

    MapMatrix sinr_map(const MapAccumulator &acc, double noise_w);

    struct CoverageResult
    {
        MapMatrix best;                 // antenna id, NaN when empty
        std::vector<double> fractions;  // share of non-empty cells won by each antenna
    };
    CoverageResult coverage_map(const MapAccumulator &acc, std::optional<double> filter_dbm = std::nullopt);

    // Fraction of all grid cells holding data (above the filter), optionally for one antenna.
    double covered_fraction(const MapAccumulator &acc, std::optional<double> filter_dbm = std::nullopt,
                            std::optional<int> antenna = std::nullopt);

    MapMatrix delay_spread_map(const MapAccumulator &acc);
    MapMatrix impacts_map(const MapAccumulator &acc);

    enum class LineOfSight
    {
        los,
        nlos
    };

    // LOS iff the open segment antenna -> point crosses no physical obstacle.
    LineOfSight los_classify(const Environment3D &env, const Vec3 &antenna, const Vec3 &point);
    LineOfSight los_classify(const QuadIndex &index, const Vec3 &antenna, const Vec3 &point);

    struct RegressionFit
    {
        double slope = 0;     // dB/m
        double intercept = 0; // dB
        std::size_t count = 0;
        double residual_rms = 0;
    };

    struct PathLossSample
    {
        double r = 0;   // horizontal distance (m)
        double pl = 0;  // dB
        LineOfSight cls = LineOfSight::los;
    };

    // Ordinary least squares of PL on r.
    std::optional<RegressionFit> fit_line(std::span<const double> r, std::span<const double> pl);

    struct PathLossFits
    {
        std::optional<RegressionFit> los, nlos;
    };
    PathLossFits path_loss_fit(std::span<const PathLossSample> samples);

    // One sample per non-empty cell for one antenna, PL = 10 log10(P0 / P_cell), classified
    // from the cell centre on the measurement plane.
    std::vector<PathLossSample> path_loss_samples(const MapAccumulator &acc, const QuadIndex &index,
                                                  const Antenna &antenna, int antenna_id, double h_m);

    // CSV: header line then n1 rows of n2 values, NaN for no data.
    std::string map_csv(const MapMatrix &m, const std::string &kind, const std::string &units,
                        const std::string &extra_header = {});
    void write_map_csv(const std::filesystem::path &path, const MapMatrix &m, const std::string &kind,
                       const std::string &units, const std::string &extra_header = {});

    // Binary 8-bit PGM. Data scales linearly from lo -> 1 to hi -> 255; no data is 0.
    std::string map_pgm(const MapMatrix &m, double lo, double hi, const std::string &comment = {});
    void write_map_pgm(const std::filesystem::path &path, const MapMatrix &m, double lo, double hi,
                       const std::string &comment = {});
} // namespace mmw

#endif
