// SPDX-License-Identifier: Apache-2.0
//
// dtsiot: LoRa direct-to-satellite IoT uplink simulator
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

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtsiot/scenario_io.hpp"
#include "dtsiot/sim_engine.hpp"
#include "dtsiot/version.hpp"

namespace {

constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

std::vector<dtsiot::StrategyKind> parse_strategies(const std::string& arg) {
    using dtsiot::StrategyKind;
    if (arg == "aloha") return {StrategyKind::Aloha};
    if (arg == "ftp") return {StrategyKind::Ftp};
    if (arg == "ctp") return {StrategyKind::Ctp};
    if (arg == "all") return {StrategyKind::Aloha, StrategyKind::Ftp, StrategyKind::Ctp};
    throw dtsiot::ConfigError("--strategy expects aloha, ftp, ctp or all");
}

unsigned worker_count_from_env() {
    if (const char* env = std::getenv("DTSIOT_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 0; // engine default: hardware concurrency
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of a LoRa direct-to-satellite IoT uplink"};
    app.set_version_flag("--version", std::string("simulate ") + dtsiot::kVersion);

    dtsiot::RunSpec spec;
    std::string strategy_arg = "all";
    std::string devices_arg;
    long long seed_arg = -1;

    app.add_option("--config", spec.scenario_path, "scenario file (key = value)")->required();
    app.add_option("--out", spec.output_dir, "output directory for CSV results")->required();
    app.add_option("--strategy", strategy_arg, "aloha|ftp|ctp|all (default all)");
    app.add_option("--devices", devices_arg,
                   "comma-separated device counts (default 50..600 step 50)");
    app.add_option("--seed", seed_arg, "override the scenario seed")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--replications", spec.replication_override,
                   "override the scenario replication count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    dtsiot::Scenario scn;
    try {
        scn = dtsiot::load_scenario(spec.scenario_path);
        spec.strategies = parse_strategies(strategy_arg);
        if (!devices_arg.empty()) {
            spec.device_sweep.clear();
            std::stringstream ss(devices_arg);
            std::string item;
            while (std::getline(ss, item, ',')) {
                int u = 0;
                try {
                    u = std::stoi(item);
                } catch (const std::exception&) {
                    throw dtsiot::ConfigError("--devices expects comma-separated integers");
                }
                if (u < 1) throw dtsiot::ConfigError("--devices values must be >= 1");
                if (!spec.device_sweep.empty() && u <= spec.device_sweep.back())
                    throw dtsiot::ConfigError("--devices values must be ascending");
                spec.device_sweep.push_back(u);
            }
            if (spec.device_sweep.empty())
                throw dtsiot::ConfigError("--devices expects at least one value");
        }
        if (seed_arg >= 0) {
            spec.has_seed_override = true;
            spec.seed_override = static_cast<std::uint64_t>(seed_arg);
            scn.seed = spec.seed_override;
        }
        if (spec.replication_override > 0) scn.replications = spec.replication_override;
        dtsiot::validate(scn);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        std::cout << "simulate " << dtsiot::kVersion << ": "
                  << spec.strategies.size() << " strategies x " << spec.device_sweep.size()
                  << " device counts x " << scn.replications << " replications (seed "
                  << scn.seed << ")\n";
        auto points = dtsiot::run_campaign(scn, spec.device_sweep, spec.strategies,
                                           worker_count_from_env());
        dtsiot::emit_results(points, spec.output_dir, scn, spec);
        for (const auto& p : points)
            std::cout << "  " << dtsiot::strategy_name(p.strategy) << " U=" << p.num_devices
                      << " goodput=" << p.goodput_mean << " +/- " << p.goodput_ci95
                      << " bytes/lap, energy=" << p.energy_mean << "\n";
        std::cout << "results written to " << spec.output_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return 0;
}
