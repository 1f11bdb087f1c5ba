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

#include "pnr/simulate.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <thread>

#include "pnr/errors.hpp"
#include "pnr/rng.hpp"

namespace pnr {
namespace {

void format_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out += buf;
}

// Fills one position's histogram; the sampler type depends on the family.
template <typename Sampler>
void count_pulses(const Sampler& sample, rng::Xoshiro256pp& gen, std::uint64_t pulses,
                  int k_max, std::span<std::uint64_t> counts, std::uint64_t& overflow) {
    for (std::uint64_t p = 0; p < pulses; ++p) {
        const int k = sample(gen);
        if (k > k_max) {
            ++overflow;
        } else {
            ++counts[k];
        }
    }
}

void run_position(const SourceStatistics& src, double t2, double peak_mean,
                  const ScanPlan& plan, double position_m,
                  std::span<std::uint64_t> counts, std::uint64_t& overflow) {
    rng::Xoshiro256pp gen = rng::position_stream(plan.seed, position_m);
    const int k_max = plan.detection.k_max;
    switch (src.family()) {
        case SourceFamily::coherent:
            count_pulses(rng::PoissonSampler(peak_mean * t2), gen,
                         plan.pulses_per_position, k_max, counts, overflow);
            return;
        case SourceFamily::thermal:
            count_pulses(rng::ThermalSampler(peak_mean * t2), gen,
                         plan.pulses_per_position, k_max, counts, overflow);
            return;
        case SourceFamily::fock:
            count_pulses(rng::BinomialThinning(src.fock_n(), t2), gen,
                         plan.pulses_per_position, k_max, counts, overflow);
            return;
    }
    throw numeric_error("run_scan: unknown source family");
}

}  // namespace

void ScanPlan::validate() const {
    if (positions_m.size() < 2) {
        throw config_error("scan plan needs at least 2 positions");
    }
    for (size_t i = 0; i < positions_m.size(); ++i) {
        if (!std::isfinite(positions_m[i])) {
            throw config_error("scan positions must be finite");
        }
        if (i > 0 && positions_m[i] <= positions_m[i - 1]) {
            throw config_error("scan positions must be strictly increasing");
        }
    }
    if (pulses_per_position < 1) {
        throw config_error("pulses_per_position must be >= 1");
    }
    detection.validate();
}

CountTable run_scan(const SourceStatistics& src, const IrradianceProfile& profile,
                    double peak_mean, const ScanPlan& plan, unsigned n_threads) {
    plan.validate();
    if (!std::isfinite(peak_mean) || peak_mean <= 0.0) {
        throw config_error("run_scan: peak mean must be finite and > 0");
    }
    // Validates fock peak means; the samplers use t2 directly in that case.
    (void)src.scaled_to_mean(peak_mean);

    const size_t n_pos = plan.positions_m.size();
    const std::vector<double> t2 = profile.evaluate(plan.positions_m);

    CountTable table;
    table.positions_m = plan.positions_m;
    table.k_max = plan.detection.k_max;
    table.pulses_per_position = plan.pulses_per_position;
    table.counts.assign(n_pos, std::vector<std::uint64_t>(plan.detection.k_max + 1, 0));
    table.overflow.assign(n_pos, 0);

    unsigned workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_pos)));

    auto work = [&](unsigned worker) {
        for (size_t i = worker; i < n_pos; i += workers) {
            run_position(src, t2[i], peak_mean, plan, plan.positions_m[i],
                         table.counts[i], table.overflow[i]);
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return table;
}

std::string CountTable::to_csv() const {
    std::string out = "x_m";
    for (int k = 0; k <= k_max; ++k) {
        out += ",k" + std::to_string(k);
    }
    out += ",overflow,total\n";
    char buf[32];
    for (size_t i = 0; i < positions_m.size(); ++i) {
        format_double(out, positions_m[i]);
        for (int k = 0; k <= k_max; ++k) {
            std::snprintf(buf, sizeof(buf), ",%" PRIu64, counts[i][k]);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%" PRIu64 ",%" PRIu64 "\n", overflow[i],
                      pulses_per_position);
        out += buf;
    }
    return out;
}

nlohmann::json CountTable::to_json(const nlohmann::json& provenance) const {
    nlohmann::json j;
    j["positions_m"] = positions_m;
    j["k_max"] = k_max;
    j["pulses_per_position"] = pulses_per_position;
    j["counts"] = counts;
    j["overflow"] = overflow;
    j["scenario"] = provenance;
    return j;
}

std::vector<double> reconstruct_classical(const CountTable& table) {
    std::vector<double> out(table.positions_m.size());
    const double inv = 1.0 / static_cast<double>(table.pulses_per_position);
    for (size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (int k = 1; k <= table.k_max; ++k) {
            acc += static_cast<double>(k) * static_cast<double>(table.counts[i][k]);
        }
        out[i] = acc * inv;
    }
    return out;
}

std::vector<double> reconstruct_spd(const CountTable& table) {
    std::vector<double> out(table.positions_m.size());
    const double inv = 1.0 / static_cast<double>(table.pulses_per_position);
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<double>(table.pulses_per_position - table.counts[i][0]) * inv;
    }
    return out;
}

std::vector<std::vector<double>> per_k_profiles(const CountTable& table) {
    std::vector<std::vector<double>> out(
        table.k_max + 1, std::vector<double>(table.positions_m.size()));
    const double inv = 1.0 / static_cast<double>(table.pulses_per_position);
    for (size_t i = 0; i < table.positions_m.size(); ++i) {
        for (int k = 0; k <= table.k_max; ++k) {
            out[k][i] = static_cast<double>(table.counts[i][k]) * inv;
        }
    }
    return out;
}

}  // namespace pnr
