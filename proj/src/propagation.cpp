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

#include "mmw/propagation.hpp"
#include "mmw/textio.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace mmw
{
    namespace
    {
        int whole_steps(double span, double step, const char *what)
        {
            if (!(step > 0.0))
                fail(ErrorKind::invalid_argument, std::string(what) + " step must be > 0");
            const double q = span / step, n = std::round(q);
            if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, q))
                fail(ErrorKind::invalid_argument, std::string(what) + " step must divide the aperture");
            return static_cast<int>(n);
        }

        template <typename T>
        void add_into(std::vector<T> &dst, const std::vector<T> &src)
        {
            if (dst.size() < src.size())
                dst.resize(src.size(), T{});
            for (std::size_t k = 0; k < src.size(); ++k)
                dst[k] += src[k];
        }

        void merge(RunReport &into, const RunReport &part)
        {
            add_into(into.impacts, part.impacts);
            add_into(into.measured_power, part.measured_power);
            add_into(into.crossings, part.crossings);
            into.pruned_rho += part.pruned_rho;
            into.pruned_power += part.pruned_power;
            into.escapes += part.escapes;
            into.high_water_mark = std::max(into.high_water_mark, part.high_water_mark);
        }

        // Any unit vector orthogonal to n.
        Vec3 orthogonal(const Vec3 &n)
        {
            int axis = 0;
            n.cwiseAbs().minCoeff(&axis);
            return n.cross(Vec3::Unit(axis)).normalized();
        }
    } // namespace

    // ---------------------------------------------------------------------------------------------

    Antenna Antenna::centered(const Vec3 &position, double p0, double theta_c, double phi_c, double width_theta,
                              double width_phi, double dtheta, double dphi)
    {
        Antenna a;
        a.position = position;
        a.p0 = p0;
        a.theta_min = std::remainder(theta_c - width_theta / 2, 2 * pi);
        a.theta_max = std::remainder(theta_c + width_theta / 2, 2 * pi);
        if (width_theta >= 2 * pi - 1e-12)
        {
            a.theta_min = theta_c - pi;
            a.theta_max = theta_c + pi;
        }
        a.phi_min = phi_c - width_phi / 2;
        a.phi_max = phi_c + width_phi / 2;
        a.dtheta = dtheta;
        a.dphi = dphi;
        return a;
    }

    double Antenna::theta_span() const
    {
        double span = theta_max - theta_min;
        if (span <= 0.0)
            span += 2 * pi;
        return span;
    }

    int Antenna::n_theta() const { return whole_steps(theta_span(), dtheta, "theta0"); }
    int Antenna::n_phi() const { return whole_steps(phi_max - phi_min, dphi, "phi0"); }

    double Antenna::solid_angle() const { return theta_span() * (std::cos(phi_min) - std::cos(phi_max)); }

    void Antenna::validate() const
    {
        if (!(p0 > 0.0))
            fail(ErrorKind::invalid_argument, "antenna power must be > 0");
        if (!(phi_min >= 0.0 && phi_max <= pi + 1e-12 && phi_max > phi_min))
            fail(ErrorKind::invalid_argument, "antenna polar range must lie in [0, pi] and be nonempty");
        if (!(theta_span() > 0.0 && theta_span() <= 2 * pi + 1e-12))
            fail(ErrorKind::invalid_argument, "antenna azimuth range is empty");
        if (!(solid_angle() > 0.0))
            fail(ErrorKind::invalid_argument, "antenna aperture has zero solid angle");
        (void)n_theta();
        (void)n_phi();
    }

    std::vector<DirectionBundle> discretize_aperture(const Antenna &antenna, int antenna_id)
    {
        antenna.validate();
        const int nt = antenna.n_theta(), np = antenna.n_phi();
        const double dt = antenna.theta_span() / nt, dp = (antenna.phi_max - antenna.phi_min) / np;
        const double omega = antenna.solid_angle();
        std::vector<DirectionBundle> out;
        out.reserve(static_cast<std::size_t>(nt) * static_cast<std::size_t>(np));
        for (int a = 0; a < nt; ++a)
        {
            const double theta = antenna.theta_min + (a + 0.5) * dt;
            for (int b = 0; b < np; ++b)
            {
                const double lo = antenna.phi_min + b * dp, hi = antenna.phi_min + (b + 1) * dp;
                DirectionBundle d;
                d.origin = antenna.position;
                d.direction = spherical_direction(theta, 0.5 * (lo + hi));
                d.solid_angle = (std::cos(lo) - std::cos(hi)) * dt;
                d.power = antenna.p0 * d.solid_angle / omega;
                d.antenna = static_cast<std::int16_t>(antenna_id);
                d.trajectory = static_cast<std::uint32_t>(out.size());
                out.push_back(d);
            }
        }
        return out;
    }

    // ---------------------------------------------------------------------------------------------

    void SimConfig::validate() const
    {
        if (max_depth < 0 || max_depth > 30000)
            fail(ErrorKind::config, "max_depth must be in [0, 30000]");
        if (!(rho_rel_threshold >= 0.0) || !(power_floor >= 0.0))
            fail(ErrorKind::config, "thresholds must be >= 0");
        if (quad_depth < 0)
            fail(ErrorKind::config, "quad depth must be >= 0");
    }

    std::uint64_t RunReport::total_impacts() const
    {
        std::uint64_t s = 0;
        for (auto v : impacts)
            s += v;
        return s;
    }

    std::string RunReport::to_text() const
    {
        std::ostringstream out;
        out << "status " << (complete ? "complete" : "FAILED") << '\n';
        if (!failure.empty())
            out << "failure " << failure << '\n';
        for (std::size_t a = 0; a < n0.size(); ++a)
            out << "antenna " << a << " N0 " << n0[a] << '\n';
        out << "impacts_total " << total_impacts() << '\n';
        for (std::size_t d = 0; d < impacts.size(); ++d)
            out << "impacts_depth " << d << ' ' << impacts[d] << '\n';
        for (std::size_t d = 0; d < crossings.size(); ++d)
            out << "crossings_depth " << d << ' ' << crossings[d] << " power_W "
                << text::format_double(d < measured_power.size() ? measured_power[d] : 0.0) << '\n';
        out << "pruned_rho " << pruned_rho << '\n';
        out << "pruned_power " << pruned_power << '\n';
        out << "escapes " << escapes << '\n';
        out << "high_water_mark " << high_water_mark << '\n';
        out << "concurrency " << concurrency << '\n';
        out << "wall_seconds " << wall_seconds << '\n';
        return out.str();
    }

    // ---------------------------------------------------------------------------------------------

    Propagator::Propagator(const Environment3D &env, const QuadIndex &index, StoreMap stores, SimConfig config)
        : env_(&env), index_(&index), stores_(std::move(stores)), config_(config)
    {
        config_.validate();
        plane_height_ = env.measurement_height();
        for (const auto &o : env.obstacles)
            if (o.kind() == ObstacleKind::measure)
                plane_rect_ = Eigen::AlignedBox2d(o.box().min().head<2>(), o.box().max().head<2>());
        obstacle_store_.resize(env.obstacles.size(), nullptr);
        for (std::size_t k = 0; k < env.obstacles.size(); ++k)
        {
            auto it = stores_.find(env.obstacles[k].material());
            if (it != stores_.end() && it->second)
                obstacle_store_[k] = it->second;
        }
        for (const auto &[id, store] : stores_)
        {
            if (!store || dirs_.contains(store))
                continue;
            const auto &g = store->grid();
            LocalDirs ld;
            for (int j = 0; j < g.n_d; ++j)
                for (int l = 0; l < g.n_p; ++l)
                {
                    ld.dirs.push_back(spherical_direction(g.phi_d(l), g.theta_d(j)));
                    ld.weight.push_back(std::sin(g.theta_d(j)) * g.dtheta_d * g.dphi_d);
                }
            dirs_.emplace(store, std::move(ld));
        }
    }

    const Propagator::LocalDirs &Propagator::local_dirs(const BrdfStore &store) const { return dirs_.at(&store); }

    const BrdfStore &Propagator::store_for(int obstacle) const
    {
        const auto *s = obstacle_store_[static_cast<std::size_t>(obstacle)];
        if (!s)
            fail(ErrorKind::config, "no BRDF store for material '" +
                                        env_->obstacles[static_cast<std::size_t>(obstacle)].material() + "'");
        return *s;
    }

    Propagator::TraceResult Propagator::trace(const DirectionBundle &b) const
    {
        TraceResult res;
        const auto hit = index_->first_hit(b.origin, b.direction, b.source_obstacle);
        if (plane_height_ && std::abs(b.direction.z()) > 1e-12)
        {
            const double t = (*plane_height_ - b.origin.z()) / b.direction.z();
            if (t > 1e-9 && (!hit || t < hit->t))
            {
                Vec3 p = b.origin + t * b.direction;
                p.z() = *plane_height_;
                const Vec2 q = p.head<2>();
                if ((q.array() >= plane_rect_.min().array() - 1e-9).all() &&
                    (q.array() <= plane_rect_.max().array() + 1e-9).all())
                    res.crossing = MeasurementPoint{p, b.power, b.path_length + t, b.antenna, b.depth, b.trajectory};
            }
        }
        if (hit)
        {
            const auto &o = env_->obstacles[static_cast<std::size_t>(hit->obstacle)];
            ImpactRecord r;
            r.position = hit->point - (o.normal().dot(hit->point) - o.plane_offset()) * o.normal();
            r.obstacle = hit->obstacle;
            r.kind = o.kind();
            r.psi = std::acos(std::min(1.0, std::abs(b.direction.dot(o.normal()))));
            r.distance = b.path_length + hit->t;
            r.depth = b.depth;
            r.trajectory = b.trajectory;
            res.impact = r;
        }
        return res;
    }

    void Propagator::diffuse(const ImpactRecord &impact, const DirectionBundle &in, std::vector<DirectionBundle> &out,
                             RunReport *report) const
    {
        const BrdfStore &store = store_for(impact.obstacle);
        const auto &g = store.grid();
        const auto &ld = local_dirs(store);
        const auto &obstacle = env_->obstacles[static_cast<std::size_t>(impact.obstacle)];

        Vec3 z = obstacle.normal();
        if (z.dot(in.direction) > 0.0)
            z = -z;
        Vec3 x = in.direction - in.direction.dot(z) * z;
        x = x.norm() < 1e-12 ? orthogonal(z) : x.normalized();
        const Vec3 y = z.cross(x);

        const int i = store.theta_i_index(impact.psi);
        const int spec = g.specular_bin(g.theta_i(i));
        const double cut = config_.rho_rel_threshold > 0.0 ? config_.rho_rel_threshold * store.row_max(i) : 0.0;
        const double ud = store.ud(i);
        const double *row = store.table().values.data() + store.table().index(i, 0, 0);

        for (std::size_t q = 0; q < ld.dirs.size(); ++q)
        {
            const double rho = row[q] + ud;
            if (!(rho > 0.0))
                continue;
            if (rho < cut)
            {
                if (report)
                    ++report->pruned_rho;
                continue;
            }
            const double power = in.power * rho * ld.weight[q];
            if (config_.power_floor > 0.0 && power < config_.power_floor)
            {
                if (report)
                    ++report->pruned_power;
                continue;
            }
            DirectionBundle c;
            c.origin = impact.position;
            if (q == static_cast<std::size_t>(spec) * static_cast<std::size_t>(g.n_p))
                c.direction = in.direction - 2.0 * in.direction.dot(z) * z;
            else
            {
                const Vec3 &l = ld.dirs[q];
                c.direction = (l.x() * x + l.y() * y + l.z() * z).normalized();
            }
            c.solid_angle = ld.weight[q];
            c.power = power;
            c.path_length = impact.distance;
            c.source_obstacle = impact.obstacle;
            c.depth = static_cast<std::int16_t>(in.depth + 1);
            c.antenna = in.antenna;
            c.trajectory = in.trajectory;
            out.push_back(c);
        }
    }

    void Propagator::run_trajectory(const DirectionBundle &root, std::vector<MeasurementPoint> *buffer,
                                    PointSink *sink, RunReport &r) const
    {
        const auto levels = static_cast<std::size_t>(config_.max_depth) + 1;
        r.impacts.assign(levels, 0);
        r.crossings.assign(levels, 0);
        r.measured_power.assign(levels, 0.0);
        std::vector<DirectionBundle> current{root}, next;
        r.high_water_mark = 1;
        while (!current.empty())
        {
            for (const auto &b : current)
            {
                const auto tr = trace(b);
                if (tr.crossing)
                {
                    const auto d = static_cast<std::size_t>(b.depth);
                    ++r.crossings[d];
                    r.measured_power[d] += tr.crossing->power;
                    if (buffer)
                        buffer->push_back(*tr.crossing);
                    else
                        sink->point(*tr.crossing);
                }
                if (!tr.impact)
                {
                    ++r.escapes;
                    continue;
                }
                ++r.impacts[static_cast<std::size_t>(b.depth)];
                if (b.depth < config_.max_depth)
                    diffuse(*tr.impact, b, next, &r);
            }
            r.high_water_mark = std::max(r.high_water_mark, current.size() + next.size());
            current.swap(next);
            next.clear();
        }
    }

    RunReport Propagator::run(const std::vector<Antenna> &antennas, PointSink &sink) const
    {
        const auto start = std::chrono::steady_clock::now();
        RunReport report;
        report.impacts.assign(static_cast<std::size_t>(config_.max_depth) + 1, 0);
        report.crossings.assign(report.impacts.size(), 0);
        report.measured_power.assign(report.impacts.size(), 0.0);

        for (std::size_t k = 0; k < env_->obstacles.size(); ++k)
            if (env_->obstacles[k].physical() && !obstacle_store_[k])
                fail(ErrorKind::config, "no BRDF store for material '" + env_->obstacles[k].material() + "'");

        std::vector<DirectionBundle> roots;
        for (std::size_t a = 0; a < antennas.size(); ++a)
        {
            auto bundles = discretize_aperture(antennas[a], static_cast<int>(a));
            report.n0.push_back(static_cast<int>(bundles.size()));
            roots.insert(roots.end(), bundles.begin(), bundles.end());
        }

        unsigned threads = config_.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config_.threads;
        threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(roots.size(), 1)));
        report.concurrency = threads;

        try
        {
            if (threads <= 1)
            {
                for (const auto &root : roots)
                {
                    RunReport part;
                    run_trajectory(root, nullptr, &sink, part);
                    merge(report, part);
                }
            }
            else
            {
                // Trajectories run concurrently; results are committed strictly in order.
                std::atomic<std::size_t> next_job{0};
                std::size_t turn = 0;
                std::mutex m;
                std::condition_variable cv;
                std::exception_ptr error;
                std::vector<std::thread> pool;
                for (unsigned t = 0; t < threads; ++t)
                    pool.emplace_back([&] {
                        std::vector<MeasurementPoint> buffer;
                        while (true)
                        {
                            const std::size_t job = next_job.fetch_add(1);
                            if (job >= roots.size())
                                return;
                            RunReport part;
                            buffer.clear();
                            bool ok = true;
                            try
                            {
                                run_trajectory(roots[job], &buffer, nullptr, part);
                            }
                            catch (...)
                            {
                                std::lock_guard lock(m);
                                if (!error)
                                    error = std::current_exception();
                                ok = false;
                            }
                            std::unique_lock lock(m);
                            cv.wait(lock, [&] { return turn == job; });
                            if (ok && !error)
                            {
                                for (const auto &p : buffer)
                                    sink.point(p);
                                merge(report, part);
                            }
                            ++turn;
                            cv.notify_all();
                        }
                    });
                for (auto &th : pool)
                    th.join();
                if (error)
                    std::rethrow_exception(error);
            }
            report.complete = true;
        }
        catch (const Error &e)
        {
            report.failure = e.what();
            report.failure_kind = e.kind();
        }
        catch (const std::exception &e)
        {
            report.failure = e.what();
            report.failure_kind = ErrorKind::numeric;
        }
        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }
} // namespace mmw
