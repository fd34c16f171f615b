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

#ifndef MMW_BRDF_HPP
#define MMW_BRDF_HPP

// Non-polarized rough-surface BRDF (Kirchhoff / He-Torrance-Sillion-Greenberg structure).
//
// Stored values are power fractions per steradian: rho * sin(theta_d) * dtheta_d * dphi_d is
// the share of the incident power leaving through that angular bin. This equals the classical
// BRDF times cos(theta_d).

#include "mmw/core.hpp"
#include "mmw/material.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace mmw
{
    // theta_i and theta_d bins are centred at (k + 1/2) * step on [0, pi/2).
    // phi_d bins are centred at k * step, so phi_d = 0 (forward, specular) is a bin centre and
    // phi_d -> 2 pi - phi_d maps bins onto bins.
    struct AngleGrid
    {
        double dtheta_i = 0, dtheta_d = 0, dphi_d = 0; // radians
        int n_i = 0, n_d = 0, n_p = 0;

        static AngleGrid from_steps(double dtheta_i, double dtheta_d, double dphi_d);
        static AngleGrid from_degrees(double dtheta_i, double dtheta_d, double dphi_d);

        double theta_i(int k) const { return (k + 0.5) * dtheta_i; }
        double theta_d(int j) const { return (j + 0.5) * dtheta_d; }
        double phi_d(int l) const { return l * dphi_d; }
        std::size_t size() const
        {
            return static_cast<std::size_t>(n_i) * static_cast<std::size_t>(n_d) * static_cast<std::size_t>(n_p);
        }
        std::size_t row_size() const { return static_cast<std::size_t>(n_d) * static_cast<std::size_t>(n_p); }

        // theta_d bin that carries the specular spike for incidence theta_i.
        int specular_bin(double theta_i) const;

        // Sum of sin(theta_d) dtheta_d dphi_d over all bins (close to 2 pi).
        double hemisphere_weight() const;

        bool operator==(const AngleGrid &) const = default;
    };

    struct BrdfSample
    {
        double rho_sr = 0, rho_dd = 0, rho_ud = 0;
        double rho() const { return rho_sr + rho_dd + rho_ud; }
    };

    // Average of |r_s|^2 and |r_p|^2 for a wave from air onto index n (n_re - i n_im).
    template <typename Scalar>
    Scalar fresnel_nonpolarized(Scalar theta, std::complex<Scalar> n)
    {
        const Scalar c = std::cos(theta), s = std::sin(theta);
        const std::complex<Scalar> n2 = n * n;
        // principal root: the transmitted wave decays into the medium
        const std::complex<Scalar> root = std::sqrt(n2 - s * s);
        const std::complex<Scalar> rs = (c - root) / (c + root);
        const std::complex<Scalar> rp = (n2 * c - root) / (n2 * c + root);
        return (std::norm(rs) + std::norm(rp)) / Scalar(2);
    }

    inline double fresnel_nonpolarized(double theta, const Material &m)
    {
        return fresnel_nonpolarized<double>(theta, m.index());
    }

    // Roughness parameter g = [(2 pi sigma0 / lambda)(cos theta_i + cos theta_d)]^2.
    double roughness_g(double theta_i, double theta_d, const Material &m, double lambda);

    // Height-correlated Smith shadowing/masking for the Gaussian surface, in [0, 1].
    double shadowing(double theta_i, double theta_d, const Material &m);

    // Diffraction sum sum_{m>=1} g^m e^{-g} / (m! m) exp(-vxy2 tau^2 / (4m)).
    struct SeriesResult
    {
        double sum = 0;
        double bound = 0; // upper bound of the truncated tail
        int terms = 0;
    };
    SeriesResult diffraction_series(double g, double vxy2_tau2, double rel_tol = 1e-12);

    // Directional-diffuse power fraction per steradian (no specular spike, no uniform part).
    double rho_dd(double theta_i, double theta_d, double phi_d, const Material &m, double lambda);

    // Specular spike value in its grid bin.
    double rho_sr_bin(double theta_i, const Material &m, double lambda, const AngleGrid &grid);

    // Specular + directional-diffuse at a grid point; rho_ud is left at zero.
    BrdfSample rho_directional(double theta_i, int j, int l, const Material &m, double lambda, const AngleGrid &grid);

    // Full sample including the uniform-diffuse constant (evaluates the whole row for it).
    BrdfSample rho_nonp(double theta_i, int j, int l, const Material &m, double lambda, const AngleGrid &grid);

    // Hemispheric sum of rho_sr + rho_dd for one incidence.
    double directional_energy(double theta_i, const Material &m, double lambda, const AngleGrid &grid);

    // Constant filling the gap between the smooth-surface Fresnel reflectance and the
    // directional energy: max(0, F(theta_i) - A) / W with W the grid hemisphere weight.
    double uniform_diffuse(double theta_i, const Material &m, double lambda, const AngleGrid &grid);
    double uniform_diffuse_from_energy(double theta_i, double directional, const Material &m, const AngleGrid &grid);

    struct BrdfTable
    {
        Material material;
        double lambda = 0;
        AngleGrid grid;
        std::vector<double> values; // rho_sr + rho_dd, ordered (theta_i, theta_d, phi_d)
        std::vector<double> ud;     // a(theta_i)

        std::size_t index(int i, int j, int l) const
        {
            return (static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.n_d) + static_cast<std::size_t>(j)) *
                       static_cast<std::size_t>(grid.n_p) +
                   static_cast<std::size_t>(l);
        }
        double at(int i, int j, int l) const { return values[index(i, j, l)] + ud[static_cast<std::size_t>(i)]; }
    };

    // Discrete hemispheric sum of the full rho (including a) for row i.
    double energy_integral(const BrdfTable &table, int i);

    // Dense evaluation; rows are split across threads (0 = hardware concurrency) with output
    // identical to a sequential run. Rows whose directional energy exceeds 1 are scaled to 1.
    BrdfTable compute_table(const Material &m, double lambda, const AngleGrid &grid, unsigned threads = 1);

    // Halves the diffusion steps from 1 degree until the directional energy changes by less
    // than epsilon for every incidence. Throws Error(convergence) below 1/32 degree.
    AngleGrid auto_discretize(const Material &m, double lambda, double epsilon, unsigned threads = 1);
} // namespace mmw

#endif
