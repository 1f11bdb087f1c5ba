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

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnr/photon_stats.hpp"
#include "pnr/profiles.hpp"

namespace pnr {

enum class ExperimentKind { single_slit, two_beam, stats_compare };
enum class AnalysisKind { fwhm, contrast, sweep, fit };

struct ScanSpec {
    std::vector<double> positions_m;  // explicit grid; otherwise auto-built
    double half_width_scales = 3.0;   // in first-null (slit/airy) or waist units
    double step_m = 0.0;              // auto grid: either a step ...
    int points = 0;                   // ... or an odd point count
    std::uint64_t pulses_per_position = 0;  // 0: analytic pipelines only
    std::uint64_t seed = 0;
    bool has_seed = false;

    bool monte_carlo() const { return pulses_per_position > 0; }
};

/// A fully parsed scenario description (versioned JSON on disk).
struct Scenario {
    int schema = 1;
    std::string name;
    std::string title;
    ExperimentKind experiment = ExperimentKind::single_slit;

    std::optional<SlitGeometry> slit;
    std::optional<PinholeGeometry> pinhole;
    std::optional<double> gaussian_waist_m;

    std::vector<SourceStatistics> sources;  // one entry except for stats-compare
    double peak_mean = 0.0;                 // single-slit / stats-compare
    double beam_mean = 0.0;                 // two-beam, per-beam peak mean
    double imbalance = 1.0;                 // two-beam
    DetectionModel detection{};

    std::vector<double> separations_rayleigh;      // two-beam sweep
    double profile_separation_rayleigh = 1.0;      // two-beam profile table
    std::vector<int> contrast_k;                   // defaults to 4..k_max

    int detected_k = 10;  // stats-compare conditioning photon number

    ScanSpec scan;
    std::set<AnalysisKind> analyses;

    nlohmann::json raw;  // original document, echoed into outputs

    /// Throws config_error naming the offending field.
    static Scenario from_json(const nlohmann::json& doc);
    /// Propagates nlohmann parse_error for malformed JSON.
    static Scenario from_file(const std::string& path);
};

struct ValidationIssue {
    bool is_error = false;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const {
        for (const auto& issue : issues) {
            if (issue.is_error) return false;
        }
        return true;
    }
};

/// Schema and physics sanity checks without running anything. Sweeps dipping
/// below the Sparrow limit produce warnings, structural problems errors.
ValidationReport validate_scenario(const Scenario& scenario);

struct RunConfig {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    unsigned n_threads = 0;  // 0: hardware count, capped by PNR_SCOPE_THREADS
};

struct RunOutputs {
    std::vector<std::string> files_written;
    std::string summary;
};

/// Executes the analytic (and, when pulses are set, Monte Carlo) pipelines
/// and writes the declared CSV/JSON outputs. Identical inputs produce
/// byte-identical files. Throws config_error / numeric_error on failure.
RunOutputs run_scenario(const Scenario& scenario, const RunConfig& config);

struct BundledScenario {
    const char* name;
    const char* json_text;
};

std::span<const BundledScenario> bundled_scenarios();

/// Resolve a path or a bundled scenario name ("fig1_slit" / "fig1_slit.json").
Scenario load_scenario(const std::string& path_or_name);

/// Worker cap from the PNR_SCOPE_THREADS environment variable (0 = no cap).
unsigned env_thread_cap();

}  // namespace pnr
