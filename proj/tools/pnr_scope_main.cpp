// Copyright 2026 The pnr-scope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnr/errors.hpp"
#include "pnr/scenario.hpp"

namespace {

// Exit codes: 0 success, 2 parse/file error, 3 schema or configuration error,
// 4 numerical failure, 1 anything unexpected.
constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

int cmd_run(const std::string& scenario_arg, const pnr::RunConfig& config) {
    const pnr::Scenario scenario = pnr::load_scenario(scenario_arg);
    const pnr::RunOutputs outputs = pnr::run_scenario(scenario, config);
    std::cout << outputs.summary;
    return kExitOk;
}

int cmd_validate(const std::string& scenario_arg) {
    const pnr::Scenario scenario = pnr::load_scenario(scenario_arg);
    const pnr::ValidationReport report = pnr::validate_scenario(scenario);
    for (const auto& issue : report.issues) {
        (issue.is_error ? std::cerr : std::cout)
            << (issue.is_error ? "error: " : "warning: ") << issue.message << "\n";
    }
    if (report.ok()) {
        std::cout << "scenario '" << scenario.name << "' is valid\n";
        return kExitOk;
    }
    return kExitConfig;
}

int cmd_list() {
    for (const auto& bundled : pnr::bundled_scenarios()) {
        const auto doc = nlohmann::json::parse(bundled.json_text);
        std::cout << bundled.name << "  -  " << doc.value("title", "") << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pnr-scope: photon-number-resolved diffraction imaging toolkit"};
    app.require_subcommand(1);

    std::string scenario_arg;
    pnr::RunConfig config;
    std::uint64_t seed_override = 0;

    CLI::App* run = app.add_subcommand("run", "Run a scenario and write its data tables");
    run->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")
        ->required();
    run->add_option("--out-dir", config.out_dir, "Directory for output files");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_override, "Override the scenario RNG seed");

    CLI::App* validate =
        app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")
        ->required();

    app.add_subcommand("list-scenarios", "List the bundled scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (seed_opt->count() > 0) config.seed_override = seed_override;
            return cmd_run(scenario_arg, config);
        }
        if (validate->parsed()) {
            return cmd_validate(scenario_arg);
        }
        return cmd_list();
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const pnr::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const pnr::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pnr::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitUnexpected;
    }
}
