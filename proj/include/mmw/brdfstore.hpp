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

#ifndef MMW_BRDFSTORE_HPP
#define MMW_BRDFSTORE_HPP

// Single-file dense BRDF store.
//
// Layout (all little-endian):
//   0   char[8]  magic "MMWBRDF1"
//   8   u32      format version
//   12  u32      reserved (0)
//   16  f64 x 8  lambda, sigma0, tau, n_re, n_im, dtheta_i, dtheta_d, dphi_d
//   80  u32 x 3  n_i, n_d, n_p
//   92  u32      reserved (0)
//   96  u64      offset of the a(theta_i) array
//   104 u64      offset of the value array
//   112 f64[n_i]            a(theta_i)
//       f64[n_i*n_d*n_p]    rho_sr + rho_dd ordered (theta_i, theta_d, phi_d)

#include "mmw/brdf.hpp"

#include <filesystem>

namespace mmw
{
    inline constexpr std::size_t brdf_header_size = 112;
    inline constexpr std::uint32_t brdf_format_version = 1;

    // Throws Error(io) when the file exists and overwrite is false.
    void write_table(const BrdfTable &table, const std::filesystem::path &path, bool overwrite = false);

    std::size_t store_file_size(const AngleGrid &grid);

    // Read-only handle, safe to share between threads.
    class BrdfStore
    {
    public:
        static BrdfStore open(const std::filesystem::path &path);
        explicit BrdfStore(BrdfTable table);

        const BrdfTable &table() const { return table_; }
        const AngleGrid &grid() const { return table_.grid; }
        const Material &material() const { return table_.material; }
        double lambda() const { return table_.lambda; }

        // Nearest bin centre, ties toward the smaller index. Throws Error(invalid_argument)
        // outside theta in [0, pi/2], phi in [0, 2 pi].
        int theta_i_index(double theta_i) const;
        int theta_d_index(double theta_d) const;
        int phi_d_index(double phi_d) const;

        double lookup(double theta_i, double theta_d, double phi_d) const;
        double value(int i, int j, int l) const { return table_.at(i, j, l); }
        double ud(int i) const { return table_.ud[static_cast<std::size_t>(i)]; }
        double row_max(int i) const { return row_max_[static_cast<std::size_t>(i)]; }

    private:
        BrdfTable table_;
        std::vector<double> row_max_;
    };
} // namespace mmw

#endif
