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
#include "mmw/quadindex.hpp"
#include "mmw/scenario.hpp"
#include "mmw/textio.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

namespace mmw
{
    int exit_code(ErrorKind kind)
    {
        switch (kind)
        {
        case ErrorKind::invalid_argument: return 2;
        case ErrorKind::config: return 3;
        case ErrorKind::io: return 4;
        case ErrorKind::format: return 5;
        case ErrorKind::convergence: return 6;
        case ErrorKind::numeric: return 7;
        }
        return 1;
    }

    namespace
    {
        namespace fs = std::filesystem;

        struct Options
        {
            fs::path config;
            fs::path out = "out";
            bool force = false;
            std::optional<std::uint64_t> seed;
            std::optional<unsigned> threads;
        };

        ScenarioConfig load(const Options &opt)
        {
            auto cfg = load_scenario(opt.config);
            if (opt.seed)
            {
                cfg.environment.tess.seed = *opt.seed;
                cfg.simulation.sim.seed = *opt.seed;
            }
            if (opt.threads)
                cfg.simulation.sim.threads = *opt.threads;
            return cfg;
        }

        void ensure_dir(const fs::path &dir)
        {
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec)
                fail(ErrorKind::io, "cannot create directory " + dir.string() + ": " + ec.message());
        }

        fs::path store_path(const MaterialSpec &m, const Options &opt)
        {
            return m.store.empty() ? opt.out / "brdf" / (m.id + ".brdf") : m.store;
        }

        // Store key: material parameters, wavelength and (unless automatic) the grid.
        bool store_matches(const BrdfStore &s, const MaterialSpec &m, double lambda)
        {
            if (!(s.material() == m.material))
                return false;
            if (std::abs(s.lambda() - lambda) > 1e-12 * lambda)
                return false;
            if (m.auto_epsilon)
                return true;
            return s.grid() == AngleGrid::from_degrees(m.dtheta_i_deg, m.dtheta_d_deg, m.dphi_d_deg);
        }

        int cmd_precompute(const Options &opt)
        {
            const auto cfg = load(opt);
            const double lambda = cfg.simulation.lambda();
            const unsigned threads = cfg.simulation.sim.threads;
            for (const auto &m : cfg.materials)
            {
                const auto path = store_path(m, opt);
                if (fs::exists(path) && !opt.force)
                {
                    bool same = false;
                    try
                    {
                        same = store_matches(BrdfStore::open(path), m, lambda);
                    }
                    catch (const Error &)
                    {
                        same = false;
                    }
                    if (same)
                    {
                        std::cout << "cached " << m.id << " " << path.string() << "\n";
                        continue;
                    }
                    fail(ErrorKind::io, "store " + path.string() + " exists with a different key (use --force)");
                }
                const auto t0 = std::chrono::steady_clock::now();
                const AngleGrid grid = m.auto_epsilon
                                           ? auto_discretize(m.material, lambda, *m.auto_epsilon, threads)
                                           : AngleGrid::from_degrees(m.dtheta_i_deg, m.dtheta_d_deg, m.dphi_d_deg);
                const auto table = compute_table(m.material, lambda, grid, threads);
                ensure_dir(path.parent_path().empty() ? fs::path(".") : path.parent_path());
                write_table(table, path, true);
                double emax = 0;
                for (int i = 0; i < grid.n_i; ++i)
                    emax = std::max(emax, energy_integral(table, i));
                const double secs =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                std::cout << "computed " << m.id << " " << path.string() << " grid " << to_degrees(grid.dtheta_i)
                          << "/" << to_degrees(grid.dtheta_d) << "/" << to_degrees(grid.dphi_d)
                          << " deg, entries " << grid.size() << ", max energy " << emax << ", " << secs << " s\n";
            }
            return 0;
        }

        EnvParams stochastic_params(const ScenarioConfig &cfg)
        {
            auto p = cfg.environment.params;
            for (const auto &m : cfg.materials)
                p.materials[m.id] = m.material;
            return p;
        }

        int cmd_gen_env(const Options &opt)
        {
            const auto cfg = load(opt);
            if (cfg.environment.mode != EnvironmentSpec::Mode::stochastic)
                fail(ErrorKind::config, "gen-env needs [environment] mode = stochastic");
            GenerationReport rep;
            const auto env = generate_environment(stochastic_params(cfg), cfg.environment.tess, &rep);
            ensure_dir(opt.out);
            const auto hash = scenario_hash(cfg);
            std::ostringstream header;
            header << "generated environment\nconfig " << hash << "\nseed " << cfg.environment.tess.seed;
            save_environment(opt.out / "environment.env", env, header.str());
            std::ostringstream r;
            r << "config " << hash << "\nseed " << cfg.environment.tess.seed << "\ncells " << rep.cells
              << "\nrooms " << rep.rooms << "\ndropped_cells " << rep.dropped_cells << "\nobstacles "
              << rep.obstacles << "\n";
            text::write_file_atomic(opt.out / "generation_report.txt", r.str());
            std::cout << r.str();
            return 0;
        }

        Environment3D build_environment(const ScenarioConfig &cfg)
        {
            Environment3D env;
            if (cfg.environment.mode == EnvironmentSpec::Mode::custom)
            {
                env = load_custom(cfg.environment.file);
                for (const auto &[id, mat] : env.materials)
                {
                    const auto *spec = cfg.find_material(id);
                    if (spec && !(spec->material == mat))
                        fail(ErrorKind::config, "material '" + id + "' differs between the config and " +
                                                    cfg.environment.file.string());
                }
            }
            else
                env = generate_environment(stochastic_params(cfg), cfg.environment.tess);
            for (const auto &o : env.obstacles)
                if (o.physical() && !cfg.find_material(o.material()))
                    fail(ErrorKind::config, "no [material] section for '" + o.material() + "'");
            env.set_measurement_plane(cfg.simulation.h_m);
            return env;
        }

        MapGrid build_grid(const ScenarioConfig &cfg, const Environment3D &env)
        {
            const auto b = env.bounds();
            const Eigen::AlignedBox2d rect(b.min().head<2>(), b.max().head<2>());
            if (cfg.output.shape == MapGrid::Shape::rect)
                return MapGrid::rect(cfg.output.n1, cfg.output.n2, rect);
            return MapGrid::polar(cfg.output.n1, cfg.output.n2, rect.center(), 0.5 * rect.diagonal().norm());
        }

        bool wants(const ScenarioConfig &cfg, const std::string &map)
        {
            return std::find(cfg.output.maps.begin(), cfg.output.maps.end(), map) != cfg.output.maps.end();
        }

        std::string fit_text(const std::optional<RegressionFit> &f)
        {
            if (!f)
                return "none";
            std::ostringstream o;
            o << "slope_db_per_m " << text::format_double(f->slope) << " intercept_db "
              << text::format_double(f->intercept) << " samples " << f->count << " rms_db "
              << text::format_double(f->residual_rms);
            return o.str();
        }

        int cmd_run(const Options &opt)
        {
            const auto cfg = load(opt);
            if (cfg.antennas.empty())
                fail(ErrorKind::config, "run needs at least one [antenna]");
            const auto env = build_environment(cfg);
            const auto index = build_quadindex(env, cfg.simulation.sim.quad_depth);
            const double lambda = cfg.simulation.lambda();

            std::vector<std::unique_ptr<BrdfStore>> owned;
            StoreMap stores;
            for (const auto &o : env.obstacles)
            {
                if (!o.physical() || stores.contains(o.material()))
                    continue;
                const auto *m = cfg.find_material(o.material());
                const auto path = store_path(*m, opt);
                if (!fs::exists(path))
                    fail(ErrorKind::io, "missing BRDF store " + path.string() + " (run precompute-brdf first)");
                owned.push_back(std::make_unique<BrdfStore>(BrdfStore::open(path)));
                if (!store_matches(*owned.back(), *m, lambda))
                    fail(ErrorKind::config, "BRDF store " + path.string() + " does not match material '" + m->id +
                                                "' at this frequency");
                stores[o.material()] = owned.back().get();
            }

            const int n_ant = static_cast<int>(cfg.antennas.size());
            MapAccumulator acc(build_grid(cfg, env), n_ant, cfg.output.delay);
            const Propagator prop(env, index, stores, cfg.simulation.sim);
            const auto report = prop.run(cfg.antennas, acc);

            ensure_dir(opt.out);
            const auto hash = scenario_hash(cfg);
            const std::string extra = "config=" + hash;
            const auto &out = cfg.output;
            std::ostringstream summary;
            summary << "config " << hash << "\n" << report.to_text();
            summary << "binned_points " << acc.binned() << "\ndropped_points " << acc.dropped() << "\n";
            for (int a = 0; a < n_ant; ++a)
                summary << "covered_fraction antenna " << a << " "
                        << text::format_double(covered_fraction(acc, out.filter_dbm, a)) << "\n";
            summary << "covered_fraction all " << text::format_double(covered_fraction(acc, out.filter_dbm)) << "\n";

            if (wants(cfg, "power"))
            {
                const auto m = power_map(acc, {}, out.filter_dbm);
                write_map_csv(opt.out / "power.csv", m, "power", "dBm", extra);
                write_map_pgm(opt.out / "power.pgm", m, out.heatmap_min_dbm, out.heatmap_max_dbm, extra);
            }
            if (wants(cfg, "sinr"))
            {
                const double noise = out.noise_bandwidth_hz > 0 ? thermal_noise(out.noise_bandwidth_hz) : 0.0;
                write_map_csv(opt.out / "sinr.csv", sinr_map(acc, noise), "sinr", "dB", extra);
            }
            if (wants(cfg, "coverage"))
            {
                const auto c = coverage_map(acc, out.filter_dbm);
                write_map_csv(opt.out / "coverage.csv", c.best, "coverage", "antenna", extra);
                for (std::size_t a = 0; a < c.fractions.size(); ++a)
                    summary << "coverage_share antenna " << a << " " << text::format_double(c.fractions[a]) << "\n";
            }
            if (wants(cfg, "delay"))
                write_map_csv(opt.out / "delay.csv", delay_spread_map(acc), "delay", "ns", extra);
            if (wants(cfg, "impacts"))
                write_map_csv(opt.out / "impacts.csv", impacts_map(acc), "impacts", "points", extra);
            if (wants(cfg, "pathloss"))
            {
                std::ostringstream pl;
                pl << "# config=" << hash << "\n";
                for (int a = 0; a < n_ant; ++a)
                {
                    const auto samples = path_loss_samples(acc, index, cfg.antennas[static_cast<std::size_t>(a)], a,
                                                           cfg.simulation.h_m);
                    const auto fits = path_loss_fit(samples);
                    pl << "antenna " << a << " los " << fit_text(fits.los) << "\n";
                    pl << "antenna " << a << " nlos " << fit_text(fits.nlos) << "\n";
                }
                text::write_file_atomic(opt.out / "pathloss.txt", pl.str());
            }
            text::write_file_atomic(opt.out / "report.txt", summary.str());
            std::cout << summary.str();

            if (!report.complete)
            {
                text::write_file_atomic(opt.out / "FAILED", report.failure + "\n");
                std::cerr << "error: " << report.failure << " (partial results written)\n";
                return exit_code(report.failure_kind);
            }
            std::error_code ec;
            fs::remove(opt.out / "FAILED", ec);
            return 0;
        }
    } // namespace

    int cli_main(int argc, char **argv)
    {
        CLI::App app{"mmWave indoor propagation with rough-surface diffusion"};
        app.require_subcommand(1);
        Options opt;
        auto add_common = [&](CLI::App *sub) {
            sub->add_option("-c,--config", opt.config, "scenario file")->required();
            sub->add_option("-o,--out", opt.out, "output directory");
            sub->add_flag("-f,--force", opt.force, "overwrite existing outputs");
            sub->add_option("--seed", opt.seed, "override every seed");
            sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
        };
        auto *pre = app.add_subcommand("precompute-brdf", "tabulate BRDFs of every material");
        auto *gen = app.add_subcommand("gen-env", "generate a stochastic environment");
        auto *run = app.add_subcommand("run", "simulate and write maps");
        for (auto *s : {pre, gen, run})
            add_common(s);
        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int rc = app.exit(e);
            return rc == 0 ? 0 : exit_code(ErrorKind::invalid_argument);
        }
        try
        {
            if (pre->parsed())
                return cmd_precompute(opt);
            if (gen->parsed())
                return cmd_gen_env(opt);
            return cmd_run(opt);
        }
        catch (const Error &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return exit_code(e.kind());
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
} // namespace mmw
