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

#ifndef MMW_PROPAGATION_HPP
#define MMW_PROPAGATION_HPP

#include "mmw/brdfstore.hpp"
#include "mmw/quadindex.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmw
{
    // Angles: theta is the azimuth from +x, phi the polar angle from +z, so phi = 135 deg points
    // 45 deg below the horizon.
    inline Vec3 spherical_direction(double theta, double phi)
    {
        return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
    }

    struct Antenna
    {
        Vec3 position = Vec3::Zero();
        double p0 = 1.0;                     // W
        double theta_min = 0, theta_max = 0; // theta_max < theta_min wraps through +-180 deg
        double phi_min = 0, phi_max = 0;
        double dtheta = deg(1.0), dphi = deg(1.0);

        // Aperture of the given widths centred on (theta_c, phi_c).
        static Antenna centered(const Vec3 &position, double p0, double theta_c, double phi_c, double width_theta,
                                double width_phi, double dtheta, double dphi);

        double theta_span() const;
        int n_theta() const;
        int n_phi() const;
        int n0() const { return n_theta() * n_phi(); }
        double solid_angle() const; // Omega_a, analytic
        void validate() const;
    };

    struct DirectionBundle
    {
        Vec3 origin = Vec3::Zero();
        Vec3 direction = Vec3::UnitX();
        double solid_angle = 0; // sr
        double power = 0;       // W
        double path_length = 0; // m, from the antenna to origin
        std::int32_t source_obstacle = -1;
        std::int16_t depth = 0;
        std::int16_t antenna = 0;
        std::uint32_t trajectory = 0;
    };

    struct ImpactRecord
    {
        Vec3 position = Vec3::Zero();
        int obstacle = -1;
        ObstacleKind kind = ObstacleKind::floor;
        double psi = 0;      // incidence angle against the normal
        double distance = 0; // cumulative path length at the impact
        int depth = 0;
        std::uint32_t trajectory = 0;
    };

    struct MeasurementPoint
    {
        Vec3 position = Vec3::Zero();
        double power = 0;
        double distance = 0;
        int antenna = 0;
        int depth = 0;
        std::uint32_t trajectory = 0;
    };

    // Receives measurement points in (antenna, trajectory, emission) order.
    class PointSink
    {
    public:
        virtual ~PointSink() = default;
        virtual void point(const MeasurementPoint &p) = 0;
    };

    class CollectingSink : public PointSink
    {
    public:
        std::vector<MeasurementPoint> points;
        void point(const MeasurementPoint &p) override { points.push_back(p); }
    };

    struct SimConfig
    {
        int max_depth = 1;              // M_d
        double rho_rel_threshold = 0.0; // fraction of the row maximum; 0 disables
        double power_floor = 0.0;       // W; 0 disables
        int quad_depth = 4;
        std::uint64_t seed = 1;
        unsigned threads = 1;

        void validate() const;
    };

    struct RunReport
    {
        std::vector<int> n0;                      // per antenna
        std::vector<std::uint64_t> impacts;       // per depth of the bundle that hit
        std::vector<double> measured_power;       // per depth, summed over crossings
        std::vector<std::uint64_t> crossings;     // per depth
        std::uint64_t pruned_rho = 0;
        std::uint64_t pruned_power = 0;
        std::uint64_t escapes = 0;
        std::size_t high_water_mark = 0;          // retained bundles, worst single trajectory
        unsigned concurrency = 1;
        double wall_seconds = 0;
        bool complete = false;
        std::string failure; // set with complete == false; results so far were delivered
        ErrorKind failure_kind = ErrorKind::numeric;

        std::uint64_t total_impacts() const;
        std::string to_text() const;
    };

    std::vector<DirectionBundle> discretize_aperture(const Antenna &antenna, int antenna_id = 0);

    using StoreMap = std::map<std::string, const BrdfStore *>;

    class Propagator
    {
    public:
        Propagator(const Environment3D &env, const QuadIndex &index, StoreMap stores, SimConfig config);

        struct TraceResult
        {
            std::optional<ImpactRecord> impact;
            std::optional<MeasurementPoint> crossing;
        };

        // First physical hit and the measurement-plane crossing before it, if any.
        TraceResult trace(const DirectionBundle &bundle) const;

        // Children of a bundle at an impact, appended to out. Counts pruning in the report.
        void diffuse(const ImpactRecord &impact, const DirectionBundle &incoming, std::vector<DirectionBundle> &out,
                     RunReport *report = nullptr) const;

        // Full level-order simulation of every antenna. Errors during tracing end the run early
        // and are reported through RunReport::failure instead of being thrown.
        RunReport run(const std::vector<Antenna> &antennas, PointSink &sink) const;

    private:
        struct LocalDirs
        {
            std::vector<Vec3> dirs; // (theta_d, phi_d) in the surface frame, theta-major
            std::vector<double> weight; // sin(theta_d) dtheta_d dphi_d
        };
        const LocalDirs &local_dirs(const BrdfStore &store) const;
        const BrdfStore &store_for(int obstacle) const;

        void run_trajectory(const DirectionBundle &root, std::vector<MeasurementPoint> *buffer, PointSink *sink,
                            RunReport &report) const;

        const Environment3D *env_;
        const QuadIndex *index_;
        StoreMap stores_;
        SimConfig config_;
        std::optional<double> plane_height_;
        Eigen::AlignedBox2d plane_rect_;
        std::vector<const BrdfStore *> obstacle_store_;
        std::map<const BrdfStore *, LocalDirs> dirs_;
    };
} // namespace mmw

#endif
