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

#include "mmw/brdfstore.hpp"
#include "mmw/textio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace mmw
{
    namespace
    {
        constexpr char magic[8] = {'M', 'M', 'W', 'B', 'R', 'D', 'F', '1'};

        void put_u32(std::string &b, std::uint32_t v)
        {
            for (int k = 0; k < 4; ++k)
                b.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
        }
        void put_u64(std::string &b, std::uint64_t v)
        {
            for (int k = 0; k < 8; ++k)
                b.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
        }
        void put_f64(std::string &b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

        std::uint64_t get_u64(const unsigned char *p)
        {
            std::uint64_t v = 0;
            for (int k = 7; k >= 0; --k)
                v = (v << 8) | p[k];
            return v;
        }
        std::uint32_t get_u32(const unsigned char *p)
        {
            std::uint32_t v = 0;
            for (int k = 3; k >= 0; --k)
                v = (v << 8) | p[k];
            return v;
        }
        double get_f64(const unsigned char *p) { return std::bit_cast<double>(get_u64(p)); }

        int nearest_theta(double theta, double step, int n, const char *what)
        {
            if (!(theta >= 0.0 && theta <= pi / 2 + 1e-12))
                fail(ErrorKind::invalid_argument, std::string(what) + " out of range [0, pi/2]");
            // centres at (k + 1/2) step; a tie at k + 1 goes to k
            const int k = static_cast<int>(std::ceil(theta / step - 1.0));
            return std::clamp(k, 0, n - 1);
        }
    } // namespace

    std::size_t store_file_size(const AngleGrid &grid)
    {
        return brdf_header_size + 8 * static_cast<std::size_t>(grid.n_i) + 8 * grid.size();
    }

    void write_table(const BrdfTable &table, const std::filesystem::path &path, bool overwrite)
    {
        const auto &g = table.grid;
        if (table.values.size() != g.size() || table.ud.size() != static_cast<std::size_t>(g.n_i))
            fail(ErrorKind::invalid_argument, "incomplete BRDF table");
        if (!overwrite && std::filesystem::exists(path))
            fail(ErrorKind::io, "refusing to overwrite existing store " + path.string());
        std::string buf;
        buf.reserve(store_file_size(g));
        buf.append(magic, sizeof magic);
        put_u32(buf, brdf_format_version);
        put_u32(buf, 0);
        for (double v : {table.lambda, table.material.sigma0, table.material.tau, table.material.n_re,
                         table.material.n_im, g.dtheta_i, g.dtheta_d, g.dphi_d})
            put_f64(buf, v);
        put_u32(buf, static_cast<std::uint32_t>(g.n_i));
        put_u32(buf, static_cast<std::uint32_t>(g.n_d));
        put_u32(buf, static_cast<std::uint32_t>(g.n_p));
        put_u32(buf, 0);
        put_u64(buf, brdf_header_size);
        put_u64(buf, brdf_header_size + 8 * static_cast<std::uint64_t>(g.n_i));
        for (double v : table.ud)
            put_f64(buf, v);
        if constexpr (std::endian::native == std::endian::little)
        {
            const auto offset = buf.size();
            buf.resize(offset + 8 * table.values.size());
            std::memcpy(buf.data() + offset, table.values.data(), 8 * table.values.size());
        }
        else
            for (double v : table.values)
                put_f64(buf, v);
        text::write_file_atomic(path, buf);
    }

    BrdfStore BrdfStore::open(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            fail(ErrorKind::io, "cannot open BRDF store " + path.string());
        const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.size() < brdf_header_size)
            fail(ErrorKind::format, "BRDF store " + path.string() + ": size mismatch (truncated header)");
        const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
        if (std::memcmp(p, magic, sizeof magic) != 0)
            fail(ErrorKind::format, "BRDF store " + path.string() + ": bad magic");
        if (get_u32(p + 8) != brdf_format_version)
            fail(ErrorKind::format, "BRDF store " + path.string() + ": unsupported version");

        BrdfTable t;
        t.lambda = get_f64(p + 16);
        t.material = Material{get_f64(p + 24), get_f64(p + 32), get_f64(p + 40), get_f64(p + 48)};
        t.grid.dtheta_i = get_f64(p + 56);
        t.grid.dtheta_d = get_f64(p + 64);
        t.grid.dphi_d = get_f64(p + 72);
        t.grid.n_i = static_cast<int>(get_u32(p + 80));
        t.grid.n_d = static_cast<int>(get_u32(p + 84));
        t.grid.n_p = static_cast<int>(get_u32(p + 88));
        const auto ud_off = get_u64(p + 96), val_off = get_u64(p + 104);
        const auto &g = t.grid;
        if (g.n_i < 1 || g.n_d < 1 || g.n_p < 1 || std::abs(g.n_i * g.dtheta_i - pi / 2) > 1e-12 ||
            std::abs(g.n_d * g.dtheta_d - pi / 2) > 1e-12 || std::abs(g.n_p * g.dphi_d - 2 * pi) > 1e-12)
            fail(ErrorKind::format, "BRDF store " + path.string() + ": inconsistent angle grid");
        if (ud_off != brdf_header_size || val_off != ud_off + 8 * static_cast<std::uint64_t>(g.n_i) ||
            bytes.size() != store_file_size(g))
            fail(ErrorKind::format, "BRDF store " + path.string() + ": size mismatch");
        t.ud.resize(static_cast<std::size_t>(g.n_i));
        for (std::size_t i = 0; i < t.ud.size(); ++i)
            t.ud[i] = get_f64(p + ud_off + 8 * i);
        t.values.resize(g.size());
        if constexpr (std::endian::native == std::endian::little)
            std::memcpy(t.values.data(), p + val_off, 8 * t.values.size());
        else
            for (std::size_t q = 0; q < t.values.size(); ++q)
                t.values[q] = get_f64(p + val_off + 8 * q);
        return BrdfStore(std::move(t));
    }

    BrdfStore::BrdfStore(BrdfTable table) : table_(std::move(table))
    {
        const auto &g = table_.grid;
        if (table_.values.size() != g.size() || table_.ud.size() != static_cast<std::size_t>(g.n_i))
            fail(ErrorKind::invalid_argument, "incomplete BRDF table");
        row_max_.resize(static_cast<std::size_t>(g.n_i));
        for (int i = 0; i < g.n_i; ++i)
        {
            const auto first = table_.values.begin() + static_cast<std::ptrdiff_t>(table_.index(i, 0, 0));
            row_max_[static_cast<std::size_t>(i)] =
                *std::max_element(first, first + static_cast<std::ptrdiff_t>(g.row_size())) +
                table_.ud[static_cast<std::size_t>(i)];
        }
    }

    int BrdfStore::theta_i_index(double theta_i) const
    {
        return nearest_theta(theta_i, grid().dtheta_i, grid().n_i, "theta_i");
    }

    int BrdfStore::theta_d_index(double theta_d) const
    {
        return nearest_theta(theta_d, grid().dtheta_d, grid().n_d, "theta_d");
    }

    int BrdfStore::phi_d_index(double phi_d) const
    {
        if (!(phi_d >= 0.0 && phi_d <= 2 * pi + 1e-12))
            fail(ErrorKind::invalid_argument, "phi_d out of range [0, 2 pi]");
        // centres at l step; a tie at l + 1/2 goes to l
        const int l = static_cast<int>(std::ceil(phi_d / grid().dphi_d - 0.5));
        return ((l % grid().n_p) + grid().n_p) % grid().n_p;
    }

    double BrdfStore::lookup(double theta_i, double theta_d, double phi_d) const
    {
        return value(theta_i_index(theta_i), theta_d_index(theta_d), phi_d_index(phi_d));
    }
} // namespace mmw
