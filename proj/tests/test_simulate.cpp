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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pnr/errors.hpp"

using namespace pnr;

namespace {

const SlitGeometry kSlit{250e-6, 1550e-9, 0.23};

ScanPlan slit_plan(std::uint64_t seed, std::uint64_t pulses, double step = 250e-6) {
    ScanPlan plan;
    const double null1 = kSlit.first_null_m();
    for (double x = -3.0 * null1; x <= 3.0 * null1 + 1e-12; x += step) {
        plan.positions_m.push_back(x);
    }
    plan.pulses_per_position = pulses;
    plan.detection = {DetectionMode::number_resolving, 9};
    plan.seed = seed;
    return plan;
}

}  // namespace

TEST_CASE("plan validation") {
    ScanPlan plan = slit_plan(1, 10);
    CHECK_NOTHROW(plan.validate());

    ScanPlan bad = plan;
    bad.positions_m = {0.0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = plan;
    bad.positions_m[1] = bad.positions_m[0];
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = plan;
    bad.pulses_per_position = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = plan;
    bad.detection.k_max = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("determinism and thread invariance") {
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);
    const auto plan = slit_plan(20260808, 2000);

    const CountTable a = run_scan(src, profile, 3.6, plan, 1);
    const CountTable b = run_scan(src, profile, 3.6, plan, 1);
    CHECK(a == b);

    const CountTable c = run_scan(src, profile, 3.6, plan, 3);
    CHECK(a == c);
    const CountTable d = run_scan(src, profile, 3.6, plan, 0);  // hardware count
    CHECK(a == d);
}

TEST_CASE("per-position streams do not depend on the rest of the plan") {
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);

    ScanPlan full = slit_plan(7, 500);
    ScanPlan subset = full;
    subset.positions_m.assign(full.positions_m.begin() + 5, full.positions_m.begin() + 15);

    const CountTable tf = run_scan(src, profile, 3.6, full, 2);
    const CountTable ts = run_scan(src, profile, 3.6, subset, 1);
    for (size_t i = 0; i < subset.positions_m.size(); ++i) {
        CHECK(ts.counts[i] == tf.counts[i + 5]);
        CHECK(ts.overflow[i] == tf.overflow[i + 5]);
    }
}

TEST_CASE("counts partition the pulses at every position") {
    const auto profile = IrradianceProfile::slit(kSlit);
    for (const auto& src : {SourceStatistics::coherent(3.6), SourceStatistics::thermal(3.6)}) {
        const auto plan = slit_plan(99, 3000);
        const CountTable t = run_scan(src, profile, 3.6, plan, 2);
        for (size_t i = 0; i < t.positions_m.size(); ++i) {
            std::uint64_t sum = t.overflow[i];
            for (auto c : t.counts[i]) sum += c;
            CHECK(sum == t.pulses_per_position);
        }
    }
}

TEST_CASE("dark positions give only zero counts") {
    // Scan exactly on the diffraction nulls where T^2 = 0.
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);
    const double null1 = kSlit.first_null_m();
    ScanPlan plan;
    plan.positions_m = {-2.0 * null1, -null1, null1, 2.0 * null1};
    plan.pulses_per_position = 5000;
    plan.detection = {DetectionMode::number_resolving, 9};
    plan.seed = 5;
    const CountTable t = run_scan(src, profile, 3.6, plan, 1);
    for (size_t i = 0; i < plan.positions_m.size(); ++i) {
        CHECK(t.counts[i][0] == plan.pulses_per_position);
        CHECK(t.overflow[i] == 0);
    }
}

TEST_CASE("lossless fock state always counts N photons") {
    const auto profile = IrradianceProfile::gaussian_beam(1.0);
    const auto src = SourceStatistics::fock(5);
    ScanPlan plan;
    plan.positions_m = {-1e-12, 1e-12};  // T^2 = 1 to machine precision
    plan.pulses_per_position = 4000;
    plan.detection = {DetectionMode::number_resolving, 9};
    plan.seed = 11;
    const CountTable t = run_scan(src, profile, 5.0, plan, 1);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(t.counts[i][5] == plan.pulses_per_position);
    }
}

TEST_CASE("peak histogram matches Poisson(3.6) within 5 standard errors") {
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);
    ScanPlan plan;
    plan.positions_m = {0.0, kSlit.first_null_m()};
    plan.pulses_per_position = 1000000;
    plan.detection = {DetectionMode::number_resolving, 9};
    plan.seed = 424242;
    const CountTable t = run_scan(src, profile, 3.6, plan, 2);
    const double n = static_cast<double>(plan.pulses_per_position);
    for (int k = 0; k <= 9; ++k) {
        const double p = oracle::poisson_pmf(3.6, k);
        const double phat = static_cast<double>(t.counts[0][k]) / n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(phat - p) <= 5.0 * se);
    }
}

TEST_CASE("thermal and fock samplers match their pmfs at a fixed position") {
    ScanPlan plan;
    plan.positions_m = {-1e-12, 1e-12};
    plan.pulses_per_position = 400000;
    plan.detection = {DetectionMode::number_resolving, 12};
    plan.seed = 31337;
    const auto profile = IrradianceProfile::gaussian_beam(1.0);
    const double n = static_cast<double>(plan.pulses_per_position);

    const CountTable th =
        run_scan(SourceStatistics::thermal(2.5), profile, 2.5, plan, 1);
    for (int k = 0; k <= 12; ++k) {
        const double p = oracle::thermal_pmf(2.5, k);
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(th.counts[0][k]) / n - p) <= 5.0 * se);
    }

    // Half transmission of |10>: binomial(10, 1/2). Scan two symmetric points
    // where the Gaussian is at exactly 1/2.
    const double w = 1.0;
    const double x_half = w * std::sqrt(std::log(2.0) / 2.0);
    ScanPlan plan2 = plan;
    plan2.positions_m = {-x_half, x_half};
    const CountTable fk =
        run_scan(SourceStatistics::fock(10), profile, 10.0, plan2, 1);
    for (int k = 0; k <= 10; ++k) {
        const double p = oracle::binomial_pmf(10, 0.5, k);
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(fk.counts[0][k]) / n - p) <= 5.0 * se);
    }
}

TEST_CASE("classical and spd reconstructions on a handmade table") {
    CountTable t;
    t.positions_m = {0.0, 1.0, 2.0};
    t.k_max = 2;
    t.pulses_per_position = 100;
    t.counts = {{50, 0, 50}, {100, 0, 0}, {0, 60, 40}};
    t.overflow = {0, 0, 0};

    const auto classical = reconstruct_classical(t);
    CHECK(classical[0] == doctest::Approx(1.0));   // (0*50 + 2*50)/100
    CHECK(classical[1] == doctest::Approx(0.0));
    CHECK(classical[2] == doctest::Approx(1.4));

    const auto spd = reconstruct_spd(t);
    CHECK(spd[0] == doctest::Approx(0.5));
    CHECK(spd[1] == doctest::Approx(0.0));
    CHECK(spd[2] == doctest::Approx(1.0));  // saturated: no zero-photon pulses

    // Overflow counts as a click but not as classical signal.
    CountTable o = t;
    o.counts[1] = {90, 0, 0};
    o.overflow[1] = 10;
    CHECK(reconstruct_classical(o)[1] == doctest::Approx(0.0));
    CHECK(reconstruct_spd(o)[1] == doctest::Approx(0.1));

    const auto per_k = per_k_profiles(t);
    for (size_t i = 0; i < t.positions_m.size(); ++i) {
        double sum = static_cast<double>(t.overflow[i]) / 100.0;
        for (int k = 0; k <= t.k_max; ++k) sum += per_k[k][i];
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("large-sample classical reconstruction tracks the mean profile") {
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);
    const double null1 = kSlit.first_null_m();
    ScanPlan plan;
    for (double x = -0.75 * null1; x <= 0.75 * null1 + 1e-12; x += 50e-6) {
        plan.positions_m.push_back(x);
    }
    plan.pulses_per_position = 100000;
    plan.detection = {DetectionMode::number_resolving, 9};
    plan.seed = 777;
    const CountTable t = run_scan(src, profile, 3.6, plan, 2);
    const auto classical = reconstruct_classical(t);
    double worst = 0.0;
    for (size_t i = 0; i < plan.positions_m.size(); ++i) {
        const double expect = 3.6 * profile.value(plan.positions_m[i]);
        worst = std::max(worst, std::abs(classical[i] - expect) / expect);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("per-k empirical rates near the analytic profile (k = 9)") {
    const auto profile = IrradianceProfile::slit(kSlit);
    const auto src = SourceStatistics::coherent(3.6);
    ScanPlan plan = slit_plan(20260808, 100000);
    const CountTable t = run_scan(src, profile, 3.6, plan, 2);
    const auto rates = per_k_profiles(t);
    const auto analytic = conditional_profile(src, profile, 9, plan.positions_m, 3.6);
    const double n = static_cast<double>(plan.pulses_per_position);
    for (size_t i = 0; i < plan.positions_m.size(); ++i) {
        const double se = std::sqrt(analytic[i] * (1.0 - analytic[i]) / n);
        CHECK(std::abs(rates[9][i] - analytic[i]) <= std::max(5.0 * se, 3.0 / n));
    }
}

TEST_CASE("csv serialization") {
    CountTable t;
    t.positions_m = {-0.001, 0.0025};
    t.k_max = 2;
    t.pulses_per_position = 10;
    t.counts = {{5, 3, 1}, {10, 0, 0}};
    t.overflow = {1, 0};
    CHECK(t.to_csv() ==
          "x_m,k0,k1,k2,overflow,total\n"
          "-0.001,5,3,1,1,10\n"
          "0.0025,10,0,0,0,10\n");

    const nlohmann::json j = t.to_json(nlohmann::json{{"name", "unit"}});
    CHECK(j["counts"][0][1] == 3);
    CHECK(j["scenario"]["name"] == "unit");
    CHECK(j["pulses_per_position"] == 10);
}
