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

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <unistd.h>

using namespace mmw;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            path = fs::temp_directory_path() / ("mmw_store_" + std::to_string(::getpid()));
            fs::create_directories(path);
        }
        ~TempDir()
        {
            std::error_code ec;
            fs::remove_all(path, ec);
        }
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    const Material plaster{0.003, 0.028, 1.76, 0.016};
} // namespace

TEST_CASE("store round trip")
{
    TempDir dir;
    const auto grid = AngleGrid::from_degrees(10, 10, 10);
    const auto table = compute_table(plaster, 0.0052, grid);
    const auto path = dir.path / "p.brdf";
    write_table(table, path);
    CHECK(fs::file_size(path) == store_file_size(grid));
    CHECK(store_file_size(grid) == brdf_header_size + 8 * (grid.n_i + grid.size()));
    CHECK(store_file_size(AngleGrid::from_degrees(1, 1, 1)) == brdf_header_size + 90 * 8 + 2916000ull * 8);

    const auto s = BrdfStore::open(path);
    CHECK(s.grid() == grid);
    CHECK(s.material() == plaster);
    CHECK(s.lambda() == 0.0052);
    CHECK(std::memcmp(s.table().values.data(), table.values.data(), 8 * table.values.size()) == 0);
    CHECK(std::memcmp(s.table().ud.data(), table.ud.data(), 8 * table.ud.size()) == 0);

    // exhaustive scan: bin-centre lookups equal the in-memory table
    for (int i = 0; i < grid.n_i; ++i)
        for (int j = 0; j < grid.n_d; ++j)
            for (int l = 0; l < grid.n_p; ++l)
                REQUIRE(s.lookup(grid.theta_i(i), grid.theta_d(j), grid.phi_d(l)) == table.at(i, j, l));

    const auto again = BrdfStore::open(path);
    CHECK(again.table().values == s.table().values);

    SUBCASE("no silent overwrite")
    {
        CHECK_THROWS_AS(write_table(table, path), Error);
        CHECK_NOTHROW(write_table(table, path, true));
    }
    SUBCASE("equal keys give identical bytes")
    {
        write_table(compute_table(plaster, 0.0052, grid), dir.path / "q.brdf");
        CHECK(slurp(path) == slurp(dir.path / "q.brdf"));
    }
    SUBCASE("truncated file")
    {
        const auto bytes = slurp(path);
        std::ofstream(dir.path / "t.brdf", std::ios::binary).write(bytes.data(), 500);
        try
        {
            (void)BrdfStore::open(dir.path / "t.brdf");
            FAIL("expected an error");
        }
        catch (const Error &e)
        {
            CHECK(e.kind() == ErrorKind::format);
            CHECK(std::string(e.what()).find("size mismatch") != std::string::npos);
        }
    }
    SUBCASE("wrong magic")
    {
        auto bytes = slurp(path);
        bytes[0] = 'X';
        std::ofstream(dir.path / "m.brdf", std::ios::binary).write(bytes.data(), static_cast<long>(bytes.size()));
        try
        {
            (void)BrdfStore::open(dir.path / "m.brdf");
            FAIL("expected an error");
        }
        catch (const Error &e)
        {
            CHECK(e.kind() == ErrorKind::format);
        }
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS(BrdfStore::open(dir.path / "none.brdf"), Error);
    }
}

TEST_CASE("nearest-bin snapping")
{
    const auto grid = AngleGrid::from_degrees(10, 10, 10);
    const BrdfStore s(compute_table(plaster, 0.0052, grid));
    // centres at 5, 15, ...; 12 snaps to 15, 9 to 5, exact midpoint 10 to the lower bin
    CHECK(s.theta_i_index(deg(12)) == 1);
    CHECK(s.theta_i_index(deg(9)) == 0);
    CHECK(s.theta_i_index(deg(10)) == 0);
    CHECK(s.theta_i_index(0.0) == 0);
    CHECK(s.theta_i_index(pi / 2) == 8);
    // phi centres at 0, 10, ...; 355 wraps to 0, 5 ties to 0
    CHECK(s.phi_d_index(deg(355.1)) == 0);
    CHECK(s.phi_d_index(deg(5)) == 0);
    CHECK(s.phi_d_index(deg(6)) == 1);
    CHECK(s.phi_d_index(2 * pi) == 0);
    CHECK(s.lookup(deg(12), deg(44), deg(21)) == s.value(1, 4, 2) + s.ud(1));
    CHECK_THROWS_AS(s.lookup(-0.1, 0.2, 0.3), Error);
    CHECK_THROWS_AS(s.lookup(0.1, 2.0, 0.3), Error);
    CHECK_THROWS_AS(s.lookup(0.1, 0.2, 7.0), Error);

    // row maxima bound every entry
    for (int i = 0; i < grid.n_i; ++i)
        for (int j = 0; j < grid.n_d; ++j)
            for (int l = 0; l < grid.n_p; ++l)
                CHECK(s.value(i, j, l) <= s.row_max(i));
}
