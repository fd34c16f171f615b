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

#include "mmw/brdf.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace mmw
{
    namespace
    {
        // Neumaier compensated sum.
        struct Accumulator
        {
            double sum = 0, c = 0;
            void add(double x)
            {
                const double t = sum + x;
                if (std::abs(sum) >= std::abs(x))
                    c += (sum - t) + x;
                else
                    c += (x - t) + sum;
                sum = t;
            }
            double value() const { return sum + c; }
        };

        int steps_in(double range, double step, const char *what)
        {
            if (!(step > 0.0) || !std::isfinite(step))
                fail(ErrorKind::invalid_argument, std::string(what) + " step must be > 0");
            const double q = range / step;
            const double n = std::round(q);
            if (n < 1.0 || std::abs(q - n) > 1e-9 * q)
                fail(ErrorKind::invalid_argument, std::string(what) + " step must divide its range");
            return static_cast<int>(n);
        }

        void check_finite(double x, const char *term)
        {
            if (!std::isfinite(x))
                fail(ErrorKind::numeric, std::string("non-finite ") + term);
        }

        double smith_lambda(double a)
        {
            return std::max(0.0, 0.5 * (std::exp(-a * a) / (a * std::sqrt(pi)) - std::erfc(a)));
        }

        // Precomputed per (material, lambda) quantities for the directional-diffuse kernel.
        struct Kernel
        {
            const Material &m;
            double lambda, k, k2tau2, n2_scale;

            Kernel(const Material &mat, double lam)
                : m(mat), lambda(lam), k(2.0 * pi / lam), k2tau2(k * k * mat.tau * mat.tau),
                  n2_scale(pi * pi * mat.tau * mat.tau / (lam * lam))
            {
                if (!(lam > 0.0) || !std::isfinite(lam))
                    fail(ErrorKind::invalid_argument, "wavelength must be > 0");
                mat.validate();
            }

            // ci, si: incidence; cd, sd: diffusion polar angle; cp, sp: azimuth; S: shadowing.
            double eval(double ci, double si, double cd, double sd, double cp, double sp, double S) const
            {
                if (m.sigma0 == 0.0 || S == 0.0)
                    return 0.0;
                const double vx = sd * cp - si, vy = sd * sp, vz = cd + ci;
                const double vxy2 = vx * vx + vy * vy;
                const double v2 = vxy2 + vz * vz;
                const double kv = k * m.sigma0 * vz;
                const double g = kv * kv;
                const auto series = diffraction_series(g, vxy2 * k2tau2);
                if (series.sum == 0.0)
                    return 0.0;
                const double n2 = n2_scale * series.sum;
                const double geo = (v2 / vz) * (v2 / vz);
                const double cos_b = std::clamp(0.5 * std::sqrt(v2), 0.0, 1.0);
                const double f = 4.0 * pi * geo * fresnel_nonpolarized<double>(std::acos(cos_b), m.index());
                const double rho = S * n2 * f / (16.0 * pi * pi * ci);
                check_finite(n2, "N2 series");
                check_finite(f, "Fresnel factor");
                check_finite(rho, "directional-diffuse term");
                return rho;
            }
        };

        // Fills one theta_i row of rho_sr + rho_dd and returns its hemispheric sum. Rows whose
        // sum exceeds 1 are scaled down to 1.
        double compute_row(double theta_i, const Material &m, double lambda, const AngleGrid &grid, double *out)
        {
            const Kernel kernel(m, lambda);
            const double ci = std::cos(theta_i), si = std::sin(theta_i);
            std::vector<double> cp(static_cast<std::size_t>(grid.n_p)), sp(cp.size());
            for (int l = 0; l < grid.n_p; ++l)
            {
                cp[static_cast<std::size_t>(l)] = std::cos(grid.phi_d(l));
                sp[static_cast<std::size_t>(l)] = std::sin(grid.phi_d(l));
            }
            const int half = grid.n_p / 2;
            Accumulator total;
            const int spec = grid.specular_bin(theta_i);
            for (int j = 0; j < grid.n_d; ++j)
            {
                const double td = grid.theta_d(j);
                const double cd = std::cos(td), sd = std::sin(td);
                const double S = shadowing(theta_i, td, m);
                double *row = out + static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.n_p);
                for (int l = 0; l <= half; ++l)
                {
                    const double v = kernel.eval(ci, si, cd, sd, cp[static_cast<std::size_t>(l)],
                                                 sp[static_cast<std::size_t>(l)], S);
                    row[l] = v;
                    row[(grid.n_p - l) % grid.n_p] = v;
                }
                if (j == spec)
                    row[0] += rho_sr_bin(theta_i, m, lambda, grid);
                const double w = sd * grid.dtheta_d * grid.dphi_d;
                for (int l = 0; l < grid.n_p; ++l)
                    total.add(row[l] * w);
            }
            double a = total.value();
            if (a > 1.0)
            {
                const double scale = 1.0 / a;
                for (std::size_t q = 0; q < grid.row_size(); ++q)
                    out[q] *= scale;
                a = 1.0;
            }
            return a;
        }

        template <typename Body>
        void parallel_rows(int rows, unsigned threads, Body &&body)
        {
            if (threads == 0)
                threads = std::max(1u, std::thread::hardware_concurrency());
            threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(rows, 1)));
            if (threads <= 1)
            {
                for (int i = 0; i < rows; ++i)
                    body(i);
                return;
            }
            std::exception_ptr error;
            std::mutex error_mutex;
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try
                    {
                        for (int i = static_cast<int>(t); i < rows; i += static_cast<int>(threads))
                            body(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                });
            for (auto &th : pool)
                th.join();
            if (error)
                std::rethrow_exception(error);
        }
    } // namespace

    AngleGrid AngleGrid::from_steps(double dtheta_i, double dtheta_d, double dphi_d)
    {
        AngleGrid g;
        g.n_i = steps_in(pi / 2, dtheta_i, "theta_i");
        g.n_d = steps_in(pi / 2, dtheta_d, "theta_d");
        g.n_p = steps_in(2 * pi, dphi_d, "phi_d");
        g.dtheta_i = (pi / 2) / g.n_i;
        g.dtheta_d = (pi / 2) / g.n_d;
        g.dphi_d = (2 * pi) / g.n_p;
        return g;
    }

    AngleGrid AngleGrid::from_degrees(double dtheta_i, double dtheta_d, double dphi_d)
    {
        return from_steps(deg(dtheta_i), deg(dtheta_d), deg(dphi_d));
    }

    int AngleGrid::specular_bin(double theta_i) const
    {
        return std::clamp(static_cast<int>(std::floor(theta_i / dtheta_d + 1e-9)), 0, n_d - 1);
    }

    double AngleGrid::hemisphere_weight() const
    {
        Accumulator acc;
        for (int j = 0; j < n_d; ++j)
            acc.add(std::sin(theta_d(j)) * dtheta_d * dphi_d * n_p);
        return acc.value();
    }

    double roughness_g(double theta_i, double theta_d, const Material &m, double lambda)
    {
        const double x = 2.0 * pi * m.sigma0 / lambda * (std::cos(theta_i) + std::cos(theta_d));
        return x * x;
    }

    double shadowing(double theta_i, double theta_d, const Material &m)
    {
        if (m.sigma0 == 0.0)
            return 1.0;
        auto parts = [&](double theta, double &lam) {
            if (theta <= 0.0)
            {
                lam = 0.0;
                return 1.0;
            }
            const double a = m.tau / (2.0 * m.sigma0 * std::tan(theta));
            lam = smith_lambda(a);
            return 1.0 - 0.5 * std::erfc(a);
        };
        double li = 0, ld = 0;
        const double pi_ = parts(theta_i, li), pd = parts(theta_d, ld);
        const double s = pi_ * pd / (1.0 + li + ld);
        return std::clamp(s, 0.0, 1.0);
    }

    SeriesResult diffraction_series(double g, double c, double rel_tol)
    {
        SeriesResult res;
        if (!(g > 0.0))
            return res;
        const double lg = std::log(g);
        Accumulator acc;
        // log of term m = m ln g - g - ln m! - ln m - c / (4m)
        double logt = lg - g - c / 4.0;
        constexpr int max_terms = 1000000;
        for (int m = 1; m <= max_terms; ++m)
        {
            const double t = std::exp(logt);
            acc.add(t);
            res.terms = m;
            const double md = m, m1 = m + 1.0;
            // ratio t_{m+1} / t_m, decreasing in m
            const double log_r = lg - std::log(m1) + std::log(md / m1) + c / (4.0 * md * m1);
            if (log_r < 0.0)
            {
                const double r = std::exp(log_r);
                const double tail = t * r / (1.0 - r);
                if (tail <= rel_tol * acc.value())
                {
                    res.sum = acc.value();
                    res.bound = tail;
                    return res;
                }
            }
            logt += log_r;
        }
        fail(ErrorKind::convergence, "diffraction series did not converge");
    }

    double rho_dd(double theta_i, double theta_d, double phi_d, const Material &m, double lambda)
    {
        const Kernel kernel(m, lambda);
        return kernel.eval(std::cos(theta_i), std::sin(theta_i), std::cos(theta_d), std::sin(theta_d),
                           std::cos(phi_d), std::sin(phi_d), shadowing(theta_i, theta_d, m));
    }

    double rho_sr_bin(double theta_i, const Material &m, double lambda, const AngleGrid &grid)
    {
        const double td = grid.theta_d(grid.specular_bin(theta_i));
        const double g = roughness_g(theta_i, theta_i, m, lambda);
        const double v = std::exp(-g) * shadowing(theta_i, theta_i, m) * fresnel_nonpolarized(theta_i, m) /
                         (std::sin(td) * grid.dtheta_d * grid.dphi_d);
        check_finite(v, "specular term");
        return v;
    }

    BrdfSample rho_directional(double theta_i, int j, int l, const Material &m, double lambda, const AngleGrid &grid)
    {
        BrdfSample s;
        s.rho_dd = rho_dd(theta_i, grid.theta_d(j), grid.phi_d(l), m, lambda);
        if (l == 0 && j == grid.specular_bin(theta_i))
            s.rho_sr = rho_sr_bin(theta_i, m, lambda, grid);
        return s;
    }

    double directional_energy(double theta_i, const Material &m, double lambda, const AngleGrid &grid)
    {
        std::vector<double> row(grid.row_size());
        return compute_row(theta_i, m, lambda, grid, row.data());
    }

    double uniform_diffuse_from_energy(double theta_i, double directional, const Material &m, const AngleGrid &grid)
    {
        const double f = fresnel_nonpolarized(theta_i, m);
        const double gap = f - directional;
        // a gap at rounding level (smooth surfaces) is no gap
        if (gap <= 1e-12 * f)
            return 0.0;
        return gap / grid.hemisphere_weight();
    }

    double uniform_diffuse(double theta_i, const Material &m, double lambda, const AngleGrid &grid)
    {
        return uniform_diffuse_from_energy(theta_i, directional_energy(theta_i, m, lambda, grid), m, grid);
    }

    BrdfSample rho_nonp(double theta_i, int j, int l, const Material &m, double lambda, const AngleGrid &grid)
    {
        std::vector<double> row(grid.row_size());
        const double a = compute_row(theta_i, m, lambda, grid, row.data());
        BrdfSample s = rho_directional(theta_i, j, l, m, lambda, grid);
        // keep components consistent with any row scaling
        const double stored = row[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.n_p) +
                                  static_cast<std::size_t>(l)];
        const double raw = s.rho_sr + s.rho_dd;
        if (raw > 0.0 && stored != raw)
        {
            s.rho_sr *= stored / raw;
            s.rho_dd *= stored / raw;
        }
        s.rho_ud = uniform_diffuse_from_energy(theta_i, a, m, grid);
        return s;
    }

    double energy_integral(const BrdfTable &table, int i)
    {
        const auto &grid = table.grid;
        Accumulator acc;
        for (int j = 0; j < grid.n_d; ++j)
        {
            const double w = std::sin(grid.theta_d(j)) * grid.dtheta_d * grid.dphi_d;
            for (int l = 0; l < grid.n_p; ++l)
                acc.add(table.at(i, j, l) * w);
        }
        return acc.value();
    }

    BrdfTable compute_table(const Material &m, double lambda, const AngleGrid &grid, unsigned threads)
    {
        m.validate();
        if (!(lambda > 0.0))
            fail(ErrorKind::invalid_argument, "wavelength must be > 0");
        if (grid.n_i < 1 || grid.n_d < 1 || grid.n_p < 1)
            fail(ErrorKind::invalid_argument, "empty angle grid");
        BrdfTable table;
        table.material = m;
        table.lambda = lambda;
        table.grid = grid;
        table.values.assign(grid.size(), 0.0);
        table.ud.assign(static_cast<std::size_t>(grid.n_i), 0.0);
        parallel_rows(grid.n_i, threads, [&](int i) {
            const double ti = grid.theta_i(i);
            try
            {
                const double a = compute_row(ti, m, lambda, grid, table.values.data() + table.index(i, 0, 0));
                table.ud[static_cast<std::size_t>(i)] = uniform_diffuse_from_energy(ti, a, m, grid);
            }
            catch (const Error &e)
            {
                throw Error(e.kind(), std::string(e.what()) + " at theta_i row " + std::to_string(i));
            }
        });
        return table;
    }

    AngleGrid auto_discretize(const Material &m, double lambda, double epsilon, unsigned threads)
    {
        if (!(epsilon > 0.0))
            fail(ErrorKind::invalid_argument, "epsilon must be > 0");
        auto energies = [&](const AngleGrid &grid) {
            std::vector<double> e(static_cast<std::size_t>(grid.n_i));
            parallel_rows(grid.n_i, threads, [&](int i) {
                std::vector<double> row(grid.row_size());
                e[static_cast<std::size_t>(i)] = compute_row(grid.theta_i(i), m, lambda, grid, row.data());
            });
            return e;
        };
        double step = 1.0;
        AngleGrid coarse = AngleGrid::from_degrees(1.0, step, step);
        auto e_coarse = energies(coarse);
        constexpr double finest = 1.0 / 32.0;
        while (step / 2.0 >= finest)
        {
            const AngleGrid fine = AngleGrid::from_degrees(1.0, step / 2.0, step / 2.0);
            const auto e_fine = energies(fine);
            double worst = 0.0;
            for (std::size_t i = 0; i < e_fine.size(); ++i)
                worst = std::max(worst, std::abs(e_fine[i] - e_coarse[i]));
            if (worst < epsilon)
                return coarse;
            coarse = fine;
            e_coarse = e_fine;
            step /= 2.0;
        }
        fail(ErrorKind::convergence, "diffusion discretization did not converge above 1/32 degree");
    }
} // namespace mmw
