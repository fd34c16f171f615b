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

#ifndef MMW_MATERIAL_HPP
#define MMW_MATERIAL_HPP

#include "mmw/core.hpp"

#include <cmath>
#include <complex>

namespace mmw
{
    // Rough dielectric or conductor surface. The complex index is n_re - i n_im.
    struct Material
    {
        double sigma0 = 0.0; // surface height standard deviation (m)
        double tau = 1.0;    // autocorrelation distance (m)
        double n_re = 1.0;
        double n_im = 0.0;

        std::complex<double> index() const { return {n_re, -n_im}; }

        void validate() const
        {
            if (!(sigma0 >= 0.0) || !std::isfinite(sigma0))
                fail(ErrorKind::invalid_argument, "material sigma0 must be >= 0");
            if (!(tau > 0.0) || !std::isfinite(tau))
                fail(ErrorKind::invalid_argument, "material tau must be > 0");
            if (!(n_re > 0.0) || !std::isfinite(n_re))
                fail(ErrorKind::invalid_argument, "material n_re must be > 0");
            if (!(n_im >= 0.0) || !std::isfinite(n_im))
                fail(ErrorKind::invalid_argument, "material n_im must be >= 0");
        }

        bool operator==(const Material &) const = default;
    };
} // namespace mmw

#endif
