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

#include "mmw/floorplan.hpp"
#include "mmw/quadindex.hpp"
#include "mmw/textio.hpp"

#include <doctest.h>

#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace mmw;

namespace
{
    const std::filesystem::path fixtures = MMW_FIXTURE_DIR;

    EnvParams office()
    {
        EnvParams p;
        p.sides = 6;
        p.window_radius = 300;
        p.h_c = 10;
        p.w_c = 35;
        p.door = DoorMode::pcent(40);
        p.h_wa = 10;
        p.h_wm = 5;
        p.floor_material = p.ceiling_material = p.outer_material = p.inner_material = "wall";
        p.materials["wall"] = Material{0.003, 0.028, 1.76, 0.016};
        return p;
    }

    TessellationParams office_tess(std::uint64_t seed)
    {
        TessellationParams t;
        t.topology = Topology::stit;
        t.law = DirectionLaw::axis_pair();
        t.reference = MorphologyReference::mean_area;
        t.reference_value = 1000;
        t.seed = seed;
        return t;
    }

    Tessellation single(const Cell &c)
    {
        Tessellation t;
        t.window = c;
        t.cells = {c};
        return t;
    }

    double line_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
    {
        const Vec2 d = (b - a).normalized();
        return std::abs(cross2<double>(d, p - a));
    }

    Vec3 random_unit(std::mt19937_64 &rng)
    {
        std::normal_distribution<double> n;
        Vec3 v(n(rng), n(rng), n(rng));
        return v.normalized();
    }
} // namespace

TEST_CASE("initial cell")
{
    CHECK(area(initial_cell(4, 300)) == doctest::Approx(180000.0));
    const auto tri = initial_cell(3, 1);
    REQUIRE(tri.size() == 3);
    for (const auto &v : tri.vertices)
        CHECK(v.norm() == doctest::Approx(1.0));
    const auto hex = initial_cell(6, 300);
    CHECK(area(hex) == doctest::Approx(1.5 * std::sqrt(3.0) * 300 * 300));
    CHECK_THROWS_AS(initial_cell(2, 1), Error);
    CHECK_THROWS_AS(initial_cell(4, 0), Error);
}

TEST_CASE("shrink cells")
{
    const auto sq = regular_polygon(4, 5 * std::sqrt(2.0)); // side 10
    auto r = shrink_cells(single(sq), 2.0);
    REQUIRE(r.rooms.size() == 1);
    CHECK(r.rooms[0].polygon.size() == 4);
    CHECK(area(r.rooms[0].polygon) == doctest::Approx(64.0));
    CHECK(perimeter(r.rooms[0].polygon) == doctest::Approx(32.0));

    // inradius 5 < w_c / 2
    auto gone = shrink_cells(single(sq), 10.5);
    CHECK(gone.rooms.empty());
    CHECK(gone.dropped == 1);

    // two neighbours separated by exactly w_c
    auto s = split(sq, Line{Vec2(1, 0), 0.0}, 0);
    REQUIRE(s);
    Tessellation two;
    two.window = sq;
    two.cells = {s->positive, s->negative};
    auto rr = shrink_cells(two, 2.0);
    REQUIRE(rr.rooms.size() == 2);
    double min_pos = 1e9, max_neg = -1e9;
    for (const auto &v : rr.rooms[0].polygon.vertices)
        min_pos = std::min(min_pos, v.x());
    for (const auto &v : rr.rooms[1].polygon.vertices)
        max_neg = std::max(max_neg, v.x());
    CHECK(min_pos - max_neg == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("room edges sit w_c / 2 from their parent edges")
{
    TessellationParams t;
    t.topology = Topology::stit;
    t.law = DirectionLaw::isotropic();
    t.edge_density = 0.1;
    t.seed = 5;
    const auto window = initial_cell(5, 60);
    const auto tess = sample_tessellation(window, t);
    const double w_c = 3.0;
    const auto r = shrink_cells(tess, w_c);
    CHECK(r.rooms.size() + r.dropped == tess.cells.size());
    for (const auto &room : r.rooms)
    {
        const auto &parent = tess.cells[static_cast<std::size_t>(room.parent)];
        const auto &poly = room.polygon;
        for (std::size_t k = 0; k < poly.size(); ++k)
        {
            const auto pk = static_cast<std::size_t>(poly.tags[k]);
            const Vec2 a = parent.edge_start(pk), b = parent.edge_end(pk);
            CHECK(line_distance(poly.edge_start(k), a, b) == doctest::Approx(w_c / 2).epsilon(1e-9));
            CHECK(line_distance(poly.edge_end(k), a, b) == doctest::Approx(w_c / 2).epsilon(1e-9));
        }
    }
}

TEST_CASE("doors")
{
    const auto sq = regular_polygon(4, 2.5 * std::sqrt(2.0)); // side 5
    std::vector<Room> rooms(3);
    for (auto &r : rooms)
        r.polygon = sq;

    auto pc = rooms;
    add_doors(pc, DoorMode::pcent(40), 11);
    CHECK(pc.size() == 3);
    for (const auto &r : pc)
    {
        REQUIRE(r.door);
        CHECK(r.door->width == doctest::Approx(2.0));
        CHECK(r.door->center == doctest::Approx(2.5));
        CHECK(wall_length(r) == doctest::Approx(perimeter(r.polygon) - 2.0).epsilon(1e-12));
    }

    auto rd = rooms;
    add_doors(rd, DoorMode::random(), 11);
    for (const auto &r : rd)
    {
        REQUIRE(r.door);
        CHECK(r.door->width > 0.0);
        CHECK(r.door->width <= 5.0);
        CHECK(r.door->center == doctest::Approx(2.5));
    }
    auto again = rooms;
    add_doors(again, DoorMode::random(), 11);
    for (std::size_t k = 0; k < rooms.size(); ++k)
    {
        CHECK(again[k].door->edge == rd[k].door->edge);
        CHECK(again[k].door->width == rd[k].door->width);
    }

    auto bad = rooms;
    CHECK_THROWS_AS(add_doors(bad, DoorMode::pcent(0), 1), Error);
    CHECK_THROWS_AS(add_doors(bad, DoorMode::pcent(120), 1), Error);
}

TEST_CASE("wall heights")
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 2000; ++k)
    {
        const double h = draw_wall_height(rng, 5, 10, 10);
        CHECK(h >= 5.0);
        CHECK(h <= 10.0);
    }
    double sum = 0;
    const int n = 10000;
    for (int k = 0; k < n; ++k)
        sum += draw_wall_height(rng, 5, 10, 1e300);
    CHECK(sum / n == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("extrusion")
{
    auto p = office();
    p.h_wm.reset();
    p.h_wa = p.h_c;
    GenerationReport rep;
    const auto env = generate_environment(p, office_tess(4), &rep);
    CHECK(env.count(ObstacleKind::floor) == 1);
    CHECK(env.count(ObstacleKind::ceiling) == 1);
    CHECK(env.count(ObstacleKind::outer_wall) == 6);
    CHECK(rep.obstacles == env.obstacles.size());
    for (const auto &o : env.obstacles)
        if (o.kind() == ObstacleKind::inner_wall)
            CHECK(o.box().max().z() == doctest::Approx(p.h_c));

    auto bad = office();
    bad.h_wa = 11;
    CHECK_THROWS_AS(generate_environment(bad, office_tess(1)), Error);
}

TEST_CASE("random wall heights stay within [h_wm, h_c]")
{
    const auto env = generate_environment(office(), office_tess(8));
    std::size_t inner = 0;
    for (const auto &o : env.obstacles)
        if (o.kind() == ObstacleKind::inner_wall)
        {
            ++inner;
            CHECK(o.box().max().z() >= 5.0 - 1e-12);
            CHECK(o.box().max().z() <= 10.0 + 1e-12);
        }
    CHECK(inner > 0);
}

TEST_CASE("generated environments are closed and fast to build")
{
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto env = generate_environment(office(), office_tess(seed));
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        CHECK(ms < 100.0);

        const auto index = build_quadindex(env, 4);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1, 1);
        int misses = 0;
        for (int k = 0; k < 300; ++k)
        {
            // interior point of the hexagon, strictly between floor and ceiling
            const Vec3 o(200 * u(rng), 200 * u(rng), 5 + 4 * u(rng));
            if (!contains_strictly(initial_cell(6, 300), o.head<2>()))
                continue;
            if (!index.first_hit(o, random_unit(rng)))
                ++misses;
        }
        CHECK(misses == 0);
    }
}

TEST_CASE("custom environment files")
{
    const auto box = load_custom(fixtures / "box.env");
    CHECK(box.obstacles.size() == 6);
    CHECK(box.count(ObstacleKind::floor) == 1);
    CHECK(box.count(ObstacleKind::ceiling) == 1);

    // manifest written when the apartment fixture was authored
    std::map<std::string, double> manifest;
    std::ifstream mf(fixtures / "apartment.manifest");
    std::string key;
    double value;
    while (mf >> key >> value)
        manifest[key] = value;
    const auto apt = load_custom(fixtures / "apartment.env");
    CHECK(apt.obstacles.size() == manifest.at("obstacles"));
    CHECK(apt.count(ObstacleKind::inner_wall) == manifest.at("inner_wall"));
    CHECK(apt.count(ObstacleKind::outer_wall) == manifest.at("outer_wall"));
    const auto b = apt.bounds();
    CHECK((b.max().x() - b.min().x()) * (b.max().y() - b.min().y()) == doctest::Approx(manifest.at("floor_area_m2")));
    CHECK(b.max().z() - b.min().z() == doctest::Approx(manifest.at("ceiling_height_m")));

    SUBCASE("undefined material names the id")
    {
        std::istringstream in("material m 0 1 1 0\n"
                              "obstacle floor m 3 0 0 0 1 0 0 0 1 0\n"
                              "obstacle ceiling ghost 3 0 0 1 1 0 1 0 1 1\n");
        try
        {
            parse_environment(in, "t.env");
            FAIL("expected an error");
        }
        catch (const Error &e)
        {
            CHECK(std::string(e.what()).find("ghost") != std::string::npos);
        }
    }
    SUBCASE("non-coplanar polygon")
    {
        std::istringstream in("material m 0 1 1 0\n"
                              "obstacle floor m 4 0 0 0 1 0 0 1 1 0.1 0 1 0\n"
                              "obstacle ceiling m 3 0 0 1 1 0 1 0 1 1\n");
        CHECK_THROWS_AS(parse_environment(in, "t.env"), Error);
    }
    SUBCASE("parse errors carry the line number")
    {
        std::istringstream in("material m 0 1 1 0\n# comment\nobstacle floor m 3 0 0 0 1 0 x 0 1 0\n");
        try
        {
            parse_environment(in, "t.env");
            FAIL("expected an error");
        }
        catch (const Error &e)
        {
            CHECK(std::string(e.what()).find("t.env:3") != std::string::npos);
        }
    }
    SUBCASE("write then parse is exact")
    {
        const auto env = generate_environment(office(), office_tess(2));
        std::ostringstream out;
        write_environment(out, env, "round trip");
        std::istringstream in(out.str());
        const auto back = parse_environment(in);
        REQUIRE(back.obstacles.size() == env.obstacles.size());
        for (std::size_t k = 0; k < env.obstacles.size(); ++k)
        {
            CHECK(back.obstacles[k].kind() == env.obstacles[k].kind());
            CHECK(back.obstacles[k].vertices() == env.obstacles[k].vertices());
        }
        CHECK(back.materials == env.materials);
    }
}

TEST_CASE("measurement plane")
{
    auto env = load_custom(fixtures / "box.env");
    env.set_measurement_plane(1.2);
    CHECK(env.measurement_height() == 1.2);
    CHECK(env.count(ObstacleKind::measure) == 1);
    env.set_measurement_plane(1.5);
    CHECK(env.count(ObstacleKind::measure) == 1);
    CHECK_THROWS_AS(env.set_measurement_plane(10.0), Error);
}

TEST_CASE("quad index structure")
{
    const auto env = load_custom(fixtures / "apartment.env");
    CHECK(build_quadindex(env, 0).leaf_count() == 1);
    CHECK(build_quadindex(env, 3).leaf_count() == 64);

    const auto q0 = build_quadindex(env, 0);
    std::size_t physical = 0;
    for (const auto &o : env.obstacles)
        physical += o.physical();
    CHECK(q0.leaf(0, 0).size() == physical);

    // every leaf lists exactly the obstacles overlapping its rectangle
    const auto q = build_quadindex(env, 3);
    for (int iy = 0; iy < q.side(); ++iy)
        for (int ix = 0; ix < q.side(); ++ix)
        {
            std::set<int> expect;
            for (std::size_t k = 0; k < env.obstacles.size(); ++k)
                if (env.obstacles[k].physical() && env.obstacles[k].overlaps_xy(q.leaf_rect(ix, iy)))
                    expect.insert(static_cast<int>(k));
            const std::set<int> got(q.leaf(ix, iy).begin(), q.leaf(ix, iy).end());
            CHECK(got == expect);
        }
}

TEST_CASE("indexed traversal agrees with brute force")
{
    const auto env = load_custom(fixtures / "apartment.env");
    const auto b = env.bounds();
    for (int depth : {0, 2, 4, 6})
    {
        const auto q = build_quadindex(env, depth);
        std::mt19937_64 rng(100 + depth);
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 500; ++k)
        {
            const Vec3 o = b.min() + (b.max() - b.min()).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
            const Vec3 d = random_unit(rng);
            const auto fast = q.first_hit(o, d);
            const auto slow = first_hit_bruteforce(env, o, d);
            REQUIRE(fast.has_value() == slow.has_value());
            if (!fast)
                continue;
            CHECK(fast->obstacle == slow->obstacle);
            CHECK(fast->t == slow->t);

            // candidate set covers every obstacle the ray actually intersects
            const auto cand = q.ray_candidates(o, d);
            const std::set<int> cs(cand.begin(), cand.end());
            for (std::size_t j = 0; j < env.obstacles.size(); ++j)
            {
                const auto &ob = env.obstacles[j];
                if (!ob.physical())
                    continue;
                const auto t = ob.intersect(o, d);
                if (t && ob.contains(o + *t * d))
                    CHECK(cs.contains(static_cast<int>(j)));
            }
        }
    }
}
