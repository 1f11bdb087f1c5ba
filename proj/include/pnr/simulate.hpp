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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnr/photon_stats.hpp"
#include "pnr/profiles.hpp"

namespace pnr {

/// Detector scan geometry: where to park the fiber, how many pulses to record
/// per position, the detector cutoff and the RNG seed.
struct ScanPlan {
    std::vector<double> positions_m;
    std::uint64_t pulses_per_position = 100000;
    DetectionModel detection{};
    std::uint64_t seed = 0;

    void validate() const;  // >= 2 strictly increasing positions, pulses >= 1
};

/// Per-position histogram of detected photon numbers plus the overflow bucket
/// for pulses beyond the detector cutoff.
struct CountTable {
    std::vector<double> positions_m;
    int k_max = 0;
    std::uint64_t pulses_per_position = 0;
    std::vector<std::vector<std::uint64_t>> counts;  // [position][k], k = 0..k_max
    std::vector<std::uint64_t> overflow;             // [position]

    bool operator==(const CountTable&) const = default;

    /// CSV with columns x_m, k0..k{kmax}, overflow, total; one row per position.
    std::string to_csv() const;

    /// JSON document with the counts and an embedded provenance block
    /// (typically the scenario that produced the scan).
    nlohmann::json to_json(const nlohmann::json& provenance) const;
};

/// Seeded Monte Carlo emulation of the scanning photon-counting experiment.
/// Each position draws pulses_per_position photon numbers from the
/// beamsplitter-transformed source via family-specific exact samplers;
/// counts above k_max land in the overflow bucket. Deterministic for a given
/// (seed, plan): positions carry independent sub-streams, so the result is
/// identical for any thread count. n_threads = 0 picks the hardware count.
CountTable run_scan(const SourceStatistics& src, const IrradianceProfile& profile,
                    double peak_mean, const ScanPlan& plan, unsigned n_threads = 1);

/// Classical reconstruction sum_k k n_k / pulses per position; overflow
/// excluded (detected photon numbers beyond the cutoff are neglected).
std::vector<double> reconstruct_classical(const CountTable& table);

/// Conventional single-photon-detector reconstruction: fraction of pulses
/// with at least one detected photon (overflow counts as a click).
std::vector<double> reconstruct_spd(const CountTable& table);

/// Per-k detection rate profiles, counts[k]/pulses; index [k][position].
std::vector<std::vector<double>> per_k_profiles(const CountTable& table);

}  // namespace pnr
