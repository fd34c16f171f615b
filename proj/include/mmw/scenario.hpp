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

#ifndef MMW_SCENARIO_HPP
#define MMW_SCENARIO_HPP

// Scenario configuration: `[section]` headers followed by `key = value` lines, '#' comments.
// Repeated sections ([material], [antenna]) form lists. Angles are in degrees, frequency in
// GHz, lengths in metres, powers in watts unless the key says otherwise.

#include "mmw/floorplan.hpp"
#include "mmw/maps.hpp"
#include "mmw/propagation.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmw
{
    struct MaterialSpec
    {
        std::string id;
        Material material;
        std::filesystem::path store;         // empty: <out>/brdf/<id>.brdf
        double dtheta_i_deg = 1.0;
        double dtheta_d_deg = 1.0;
        double dphi_d_deg = 1.0;
        std::optional<double> auto_epsilon;  // set: choose the diffusion steps automatically
    };

    struct EnvironmentSpec
    {
        enum class Mode
        {
            custom,
            stochastic
        };
        Mode mode = Mode::custom;
        std::filesystem::path file; // custom

        EnvParams params;           // stochastic
        TessellationParams tess;
    };

    struct SimulationSpec
    {
        double frequency_ghz = 60.0;
        double h_m = 1.2;
        SimConfig sim;

        double lambda() const { return speed_of_light / (frequency_ghz * 1e9); }
    };

    struct OutputSpec
    {
        MapGrid::Shape shape = MapGrid::Shape::rect;
        int n1 = 100, n2 = 100;
        std::vector<std::string> maps{"power", "impacts"};
        std::optional<double> filter_dbm;
        double noise_bandwidth_hz = 0.0; // 0: no noise term
        double heatmap_min_dbm = -200.0, heatmap_max_dbm = 0.0;
        DelayStatistic delay = DelayStatistic::mean_excess;
    };

    struct ScenarioConfig
    {
        EnvironmentSpec environment;
        std::vector<MaterialSpec> materials;
        std::vector<Antenna> antennas;
        SimulationSpec simulation;
        OutputSpec output;

        const MaterialSpec *find_material(const std::string &id) const;
        void validate() const;
    };

    // Relative paths are resolved against base_dir. Errors are Error(config) with line numbers.
    ScenarioConfig parse_scenario(std::istream &in, const std::string &source = "<config>",
                                  const std::filesystem::path &base_dir = {});
    ScenarioConfig load_scenario(const std::filesystem::path &path);

    // Canonical text form; parse(serialize(c)) reproduces c.
    std::string serialize_scenario(const ScenarioConfig &config);

    // FNV-1a of the canonical form, as 16 hex digits.
    std::string scenario_hash(const ScenarioConfig &config);

    // Command-line entry point: precompute-brdf, gen-env, run. Returns the process exit code.
    int cli_main(int argc, char **argv);

    // Exit codes by error kind.
    int exit_code(ErrorKind kind);
} // namespace mmw

#endif
