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

#include "mmw/scenario.hpp"
#include "mmw/textio.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mmw
{
    namespace
    {
        struct Entry
        {
            std::string value;
            int line = 0;
            bool used = false;
        };

        // One [section] block with its key = value entries.
        struct Section
        {
            std::string name;
            int line = 0;
            std::map<std::string, Entry> entries;
            const std::string *source = nullptr;

            [[noreturn]] void error(int at, const std::string &what) const
            {
                fail(ErrorKind::config, *source + ":" + std::to_string(at) + ": [" + name + "] " + what);
            }

            Entry *find(const std::string &key)
            {
                auto it = entries.find(key);
                if (it == entries.end())
                    return nullptr;
                it->second.used = true;
                return &it->second;
            }

            bool has(const std::string &key) const { return entries.contains(key); }

            std::string str(const std::string &key)
            {
                auto *e = find(key);
                if (!e)
                    error(line, "missing required field '" + key + "'");
                return e->value;
            }
            std::string str(const std::string &key, const std::string &dflt)
            {
                auto *e = find(key);
                return e ? e->value : dflt;
            }

            double num(const std::string &key)
            {
                auto *e = find(key);
                if (!e)
                    error(line, "missing required field '" + key + "'");
                return parse_num(*e, key);
            }
            double num(const std::string &key, double dflt)
            {
                auto *e = find(key);
                return e ? parse_num(*e, key) : dflt;
            }
            std::optional<double> opt(const std::string &key)
            {
                auto *e = find(key);
                if (!e)
                    return std::nullopt;
                return parse_num(*e, key);
            }
            long integer(const std::string &key, long dflt)
            {
                auto *e = find(key);
                if (!e)
                    return dflt;
                try
                {
                    return text::parse_int(e->value);
                }
                catch (const Error &)
                {
                    error(e->line, "field '" + key + "' expects an integer, got '" + e->value + "'");
                }
            }
            std::uint64_t u64(const std::string &key, std::uint64_t dflt)
            {
                auto *e = find(key);
                if (!e)
                    return dflt;
                try
                {
                    return text::parse_uint64(e->value);
                }
                catch (const Error &)
                {
                    error(e->line, "field '" + key + "' expects an unsigned integer, got '" + e->value + "'");
                }
            }

            void check_unused() const
            {
                for (const auto &[k, e] : entries)
                    if (!e.used)
                        error(e.line, "unknown field '" + k + "'");
            }

        private:
            double parse_num(const Entry &e, const std::string &key) const
            {
                try
                {
                    return text::parse_double(e.value);
                }
                catch (const Error &)
                {
                    error(e.line, "field '" + key + "' expects a number, got '" + e.value + "'");
                }
            }
        };

        std::vector<Section> read_sections(std::istream &in, const std::string &source_name,
                                           const std::string *source)
        {
            std::vector<Section> out;
            std::string raw;
            int line_no = 0;
            while (std::getline(in, raw))
            {
                ++line_no;
                const auto line = text::trim(text::strip_comment(raw));
                if (line.empty())
                    continue;
                if (line.front() == '[')
                {
                    if (line.back() != ']')
                        fail(ErrorKind::config, source_name + ":" + std::to_string(line_no) + ": malformed section header");
                    Section s;
                    s.name = std::string(text::trim(line.substr(1, line.size() - 2)));
                    s.line = line_no;
                    s.source = source;
                    out.push_back(std::move(s));
                    continue;
                }
                const auto eq = line.find('=');
                if (eq == std::string_view::npos)
                    fail(ErrorKind::config, source_name + ":" + std::to_string(line_no) + ": expected key = value");
                if (out.empty())
                    fail(ErrorKind::config, source_name + ":" + std::to_string(line_no) + ": key outside any section");
                const std::string key(text::trim(line.substr(0, eq)));
                const std::string value(text::trim(line.substr(eq + 1)));
                if (key.empty())
                    fail(ErrorKind::config, source_name + ":" + std::to_string(line_no) + ": empty key");
                if (!out.back().entries.emplace(key, Entry{value, line_no, false}).second)
                    fail(ErrorKind::config,
                         source_name + ":" + std::to_string(line_no) + ": duplicate field '" + key + "'");
            }
            return out;
        }

        // Degree text whose conversion reproduces the stored radians exactly.
        std::string degrees_text(double radians)
        {
            double d = to_degrees(radians);
            for (int k = 0; k < 64 && deg(d) != radians; ++k)
                d = std::nextafter(d, deg(d) < radians ? HUGE_VAL : -HUGE_VAL);
            return text::format_double(d);
        }

        std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p)
        {
            std::filesystem::path path(p);
            if (path.is_relative() && !base.empty())
                path = base / path;
            return path.lexically_normal();
        }

        template <typename Enum>
        Enum pick(Section &s, const std::string &key, const std::vector<std::pair<std::string, Enum>> &choices,
                  Enum dflt)
        {
            auto *e = s.find(key);
            if (!e)
                return dflt;
            for (const auto &[name, v] : choices)
                if (name == e->value)
                    return v;
            std::string allowed;
            for (const auto &c : choices)
                allowed += (allowed.empty() ? "" : ", ") + c.first;
            s.error(e->line, "field '" + key + "' must be one of " + allowed + ", got '" + e->value + "'");
        }

        template <typename Enum>
        std::string name_of(Enum v, const std::vector<std::pair<std::string, Enum>> &choices)
        {
            for (const auto &[name, c] : choices)
                if (c == v)
                    return name;
            return "?";
        }

        const std::vector<std::pair<std::string, Topology>> topologies{{"plt", Topology::plt}, {"stit", Topology::stit}};
        const std::vector<std::pair<std::string, DirectionLaw::Mode>> laws{
            {"isotropic", DirectionLaw::Mode::isotropic},
            {"axis_pair", DirectionLaw::Mode::axis_pair},
            {"mixture", DirectionLaw::Mode::mixture},
            {"single", DirectionLaw::Mode::single}};
        const std::vector<std::pair<std::string, MorphologyReference>> references{
            {"edge_density", MorphologyReference::edge_density},
            {"area", MorphologyReference::mean_area},
            {"perimeter", MorphologyReference::mean_perimeter}};
        const std::vector<std::pair<std::string, DoorMode::Kind>> doors{{"rand", DoorMode::Kind::rand},
                                                                        {"pcent", DoorMode::Kind::pcent}};
        const std::vector<std::pair<std::string, EnvironmentSpec::Mode>> env_modes{
            {"custom", EnvironmentSpec::Mode::custom}, {"stochastic", EnvironmentSpec::Mode::stochastic}};
        const std::vector<std::pair<std::string, MapGrid::Shape>> shapes{{"rect", MapGrid::Shape::rect},
                                                                         {"polar", MapGrid::Shape::polar}};
        const std::vector<std::pair<std::string, DelayStatistic>> delays{
            {"mean_excess", DelayStatistic::mean_excess}, {"mean_pairwise", DelayStatistic::mean_pairwise}};

        const std::vector<std::string> known_maps{"power", "sinr", "coverage", "delay", "impacts", "pathloss"};

        void parse_environment_section(Section &s, EnvironmentSpec &env, const std::filesystem::path &base)
        {
            env.mode = pick(s, "mode", env_modes, EnvironmentSpec::Mode::custom);
            if (env.mode == EnvironmentSpec::Mode::custom)
            {
                env.file = resolve(base, s.str("file"));
                return;
            }
            auto &p = env.params;
            auto &t = env.tess;
            t.topology = pick(s, "topology", topologies, Topology::stit);
            t.law.mode = pick(s, "law", laws, DirectionLaw::Mode::axis_pair);
            t.law.alpha = s.num("alpha", t.law.mode == DirectionLaw::Mode::axis_pair ? 1.0 : 0.0);
            t.reference = pick(s, "reference", references, MorphologyReference::edge_density);
            t.edge_density = s.num("edge_density", 1.0);
            t.reference_value = s.num("reference_value", 0.0);
            t.seed = s.u64("seed", 1);
            p.sides = static_cast<int>(s.integer("sides", 4));
            p.window_radius = s.num("window_radius");
            p.h_c = s.num("h_c");
            p.w_c = s.num("w_c");
            p.door.kind = pick(s, "door", doors, DoorMode::Kind::rand);
            p.door.w0_percent = s.num("door_w0_percent", 100.0);
            p.h_wa = s.num("h_wa");
            p.h_wm = s.opt("h_wm");
            p.tilt = deg(s.num("tilt_deg", 0.0));
            p.floor_material = s.str("floor_material");
            p.ceiling_material = s.str("ceiling_material");
            p.outer_material = s.str("outer_material");
            p.inner_material = s.str("inner_material");
        }

        MaterialSpec parse_material_section(Section &s, const std::filesystem::path &base)
        {
            MaterialSpec m;
            m.id = s.str("id");
            m.material.sigma0 = s.num("sigma0");
            m.material.tau = s.num("tau");
            m.material.n_re = s.num("n_re");
            m.material.n_im = s.num("n_im");
            if (auto *e = s.find("store"))
                m.store = resolve(base, e->value);
            m.dtheta_i_deg = s.num("dtheta_i_deg", 1.0);
            m.dtheta_d_deg = s.num("dtheta_d_deg", 1.0);
            m.dphi_d_deg = s.num("dphi_d_deg", 1.0);
            m.auto_epsilon = s.opt("auto_epsilon");
            try
            {
                m.material.validate();
            }
            catch (const Error &e)
            {
                s.error(s.line, e.what());
            }
            return m;
        }

        Antenna parse_antenna_section(Section &s)
        {
            Antenna a;
            a.position = Vec3(s.num("x"), s.num("y"), s.num("z"));
            if (s.has("power_mw"))
                a.p0 = s.num("power_mw") * 1e-3;
            else
                a.p0 = s.num("power_w");
            a.dtheta = deg(s.num("dtheta_deg", 1.0));
            a.dphi = deg(s.num("dphi_deg", 1.0));
            if (s.has("theta_center_deg"))
            {
                const auto c = Antenna::centered(a.position, a.p0, deg(s.num("theta_center_deg")),
                                                 deg(s.num("phi_center_deg")), deg(s.num("width_theta_deg")),
                                                 deg(s.num("width_phi_deg")), a.dtheta, a.dphi);
                a = c;
            }
            else
            {
                a.theta_min = deg(s.num("theta_min_deg"));
                a.theta_max = deg(s.num("theta_max_deg"));
                a.phi_min = deg(s.num("phi_min_deg"));
                a.phi_max = deg(s.num("phi_max_deg"));
            }
            try
            {
                a.validate();
            }
            catch (const Error &e)
            {
                s.error(s.line, e.what());
            }
            return a;
        }

        void parse_simulation_section(Section &s, SimulationSpec &sim)
        {
            sim.frequency_ghz = s.num("frequency_ghz");
            sim.h_m = s.num("h_m");
            sim.sim.max_depth = static_cast<int>(s.integer("max_depth", 1));
            sim.sim.rho_rel_threshold = s.num("rho_rel_threshold", 0.0);
            sim.sim.power_floor = s.num("power_floor_w", 0.0);
            sim.sim.quad_depth = static_cast<int>(s.integer("quad_depth", 4));
            sim.sim.threads = static_cast<unsigned>(s.integer("threads", 1));
            sim.sim.seed = s.u64("seed", 1);
        }

        void parse_output_section(Section &s, OutputSpec &out)
        {
            out.shape = pick(s, "grid", shapes, MapGrid::Shape::rect);
            out.n1 = static_cast<int>(s.integer("n1", 100));
            out.n2 = static_cast<int>(s.integer("n2", 100));
            if (auto *e = s.find("maps"))
            {
                out.maps.clear();
                std::string item;
                std::istringstream list(e->value);
                while (std::getline(list, item, ','))
                {
                    const std::string name(text::trim(item));
                    if (name.empty())
                        continue;
                    if (std::find(known_maps.begin(), known_maps.end(), name) == known_maps.end())
                        s.error(e->line, "unknown map '" + name + "'");
                    out.maps.push_back(name);
                }
            }
            out.filter_dbm = s.opt("filter_dbm");
            out.noise_bandwidth_hz = s.num("noise_bandwidth_hz", 0.0);
            out.heatmap_min_dbm = s.num("heatmap_min_dbm", -200.0);
            out.heatmap_max_dbm = s.num("heatmap_max_dbm", 0.0);
            out.delay = pick(s, "delay", delays, DelayStatistic::mean_excess);
        }
    } // namespace

    const MaterialSpec *ScenarioConfig::find_material(const std::string &id) const
    {
        for (const auto &m : materials)
            if (m.id == id)
                return &m;
        return nullptr;
    }

    void ScenarioConfig::validate() const
    {
        if (!(simulation.frequency_ghz > 0.0))
            fail(ErrorKind::config, "[simulation] frequency_ghz must be > 0");
        simulation.sim.validate();
        for (std::size_t i = 0; i < materials.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (materials[i].id == materials[j].id)
                    fail(ErrorKind::config, "duplicate material id '" + materials[i].id + "'");
        if (environment.mode == EnvironmentSpec::Mode::stochastic)
        {
            const auto &p = environment.params;
            for (const auto *id : {&p.floor_material, &p.ceiling_material, &p.outer_material, &p.inner_material})
                if (!find_material(*id))
                    fail(ErrorKind::config, "[environment] refers to unknown material '" + *id + "'");
        }
        if (output.n1 < 1 || output.n2 < 1)
            fail(ErrorKind::config, "[output] n1 and n2 must be >= 1");
        if (!(output.heatmap_max_dbm > output.heatmap_min_dbm))
            fail(ErrorKind::config, "[output] heatmap_max_dbm must exceed heatmap_min_dbm");
        const bool wants_sinr =
            std::find(output.maps.begin(), output.maps.end(), "sinr") != output.maps.end();
        if (wants_sinr && antennas.size() == 1 && !(output.noise_bandwidth_hz > 0.0))
            fail(ErrorKind::config, "[output] sinr with one antenna needs noise_bandwidth_hz > 0");
    }

    ScenarioConfig parse_scenario(std::istream &in, const std::string &source, const std::filesystem::path &base_dir)
    {
        ScenarioConfig cfg;
        auto sections = read_sections(in, source, &source);
        bool seen_env = false, seen_sim = false, seen_out = false;
        for (auto &s : sections)
        {
            auto once = [&](bool &flag) {
                if (flag)
                    s.error(s.line, "section may appear only once");
                flag = true;
            };
            if (s.name == "environment")
            {
                once(seen_env);
                parse_environment_section(s, cfg.environment, base_dir);
            }
            else if (s.name == "material")
                cfg.materials.push_back(parse_material_section(s, base_dir));
            else if (s.name == "antenna")
                cfg.antennas.push_back(parse_antenna_section(s));
            else if (s.name == "simulation")
            {
                once(seen_sim);
                parse_simulation_section(s, cfg.simulation);
            }
            else if (s.name == "output")
            {
                once(seen_out);
                parse_output_section(s, cfg.output);
            }
            else
                s.error(s.line, "unknown section");
            s.check_unused();
        }
        if (!seen_env)
            fail(ErrorKind::config, source + ": missing [environment] section");
        if (!seen_sim)
            fail(ErrorKind::config, source + ": missing [simulation] section");
        cfg.validate();
        return cfg;
    }

    ScenarioConfig load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::io, "cannot open config " + path.string());
        return parse_scenario(in, path.string(), path.parent_path());
    }

    std::string serialize_scenario(const ScenarioConfig &c)
    {
        std::ostringstream o;
        auto num = [](double v) { return text::format_double(v); };
        const auto &e = c.environment;
        o << "[environment]\n";
        o << "mode = " << name_of(e.mode, env_modes) << '\n';
        if (e.mode == EnvironmentSpec::Mode::custom)
            o << "file = " << e.file.string() << '\n';
        else
        {
            const auto &p = e.params;
            const auto &t = e.tess;
            o << "topology = " << name_of(t.topology, topologies) << '\n';
            o << "law = " << name_of(t.law.mode, laws) << '\n';
            o << "alpha = " << num(t.law.alpha) << '\n';
            o << "reference = " << name_of(t.reference, references) << '\n';
            o << "edge_density = " << num(t.edge_density) << '\n';
            o << "reference_value = " << num(t.reference_value) << '\n';
            o << "seed = " << t.seed << '\n';
            o << "sides = " << p.sides << '\n';
            o << "window_radius = " << num(p.window_radius) << '\n';
            o << "h_c = " << num(p.h_c) << '\n';
            o << "w_c = " << num(p.w_c) << '\n';
            o << "door = " << name_of(p.door.kind, doors) << '\n';
            o << "door_w0_percent = " << num(p.door.w0_percent) << '\n';
            o << "h_wa = " << num(p.h_wa) << '\n';
            if (p.h_wm)
                o << "h_wm = " << num(*p.h_wm) << '\n';
            o << "tilt_deg = " << degrees_text(p.tilt) << '\n';
            o << "floor_material = " << p.floor_material << '\n';
            o << "ceiling_material = " << p.ceiling_material << '\n';
            o << "outer_material = " << p.outer_material << '\n';
            o << "inner_material = " << p.inner_material << '\n';
        }
        for (const auto &m : c.materials)
        {
            o << "\n[material]\n";
            o << "id = " << m.id << '\n';
            o << "sigma0 = " << num(m.material.sigma0) << '\n';
            o << "tau = " << num(m.material.tau) << '\n';
            o << "n_re = " << num(m.material.n_re) << '\n';
            o << "n_im = " << num(m.material.n_im) << '\n';
            if (!m.store.empty())
                o << "store = " << m.store.string() << '\n';
            o << "dtheta_i_deg = " << num(m.dtheta_i_deg) << '\n';
            o << "dtheta_d_deg = " << num(m.dtheta_d_deg) << '\n';
            o << "dphi_d_deg = " << num(m.dphi_d_deg) << '\n';
            if (m.auto_epsilon)
                o << "auto_epsilon = " << num(*m.auto_epsilon) << '\n';
        }
        for (const auto &a : c.antennas)
        {
            o << "\n[antenna]\n";
            o << "x = " << num(a.position.x()) << "\ny = " << num(a.position.y()) << "\nz = " << num(a.position.z())
              << '\n';
            o << "power_w = " << num(a.p0) << '\n';
            o << "theta_min_deg = " << degrees_text(a.theta_min) << '\n';
            o << "theta_max_deg = " << degrees_text(a.theta_max) << '\n';
            o << "phi_min_deg = " << degrees_text(a.phi_min) << '\n';
            o << "phi_max_deg = " << degrees_text(a.phi_max) << '\n';
            o << "dtheta_deg = " << degrees_text(a.dtheta) << '\n';
            o << "dphi_deg = " << degrees_text(a.dphi) << '\n';
        }
        const auto &s = c.simulation;
        o << "\n[simulation]\n";
        o << "frequency_ghz = " << num(s.frequency_ghz) << '\n';
        o << "h_m = " << num(s.h_m) << '\n';
        o << "max_depth = " << s.sim.max_depth << '\n';
        o << "rho_rel_threshold = " << num(s.sim.rho_rel_threshold) << '\n';
        o << "power_floor_w = " << num(s.sim.power_floor) << '\n';
        o << "quad_depth = " << s.sim.quad_depth << '\n';
        o << "threads = " << s.sim.threads << '\n';
        o << "seed = " << s.sim.seed << '\n';
        const auto &out = c.output;
        o << "\n[output]\n";
        o << "grid = " << name_of(out.shape, shapes) << '\n';
        o << "n1 = " << out.n1 << "\nn2 = " << out.n2 << '\n';
        o << "maps = ";
        for (std::size_t k = 0; k < out.maps.size(); ++k)
            o << (k ? ", " : "") << out.maps[k];
        o << '\n';
        if (out.filter_dbm)
            o << "filter_dbm = " << num(*out.filter_dbm) << '\n';
        o << "noise_bandwidth_hz = " << num(out.noise_bandwidth_hz) << '\n';
        o << "heatmap_min_dbm = " << num(out.heatmap_min_dbm) << '\n';
        o << "heatmap_max_dbm = " << num(out.heatmap_max_dbm) << '\n';
        o << "delay = " << name_of(out.delay, delays) << '\n';
        return o.str();
    }

    std::string scenario_hash(const ScenarioConfig &config)
    {
        return text::hex64(text::fnv1a(serialize_scenario(config)));
    }
} // namespace mmw
