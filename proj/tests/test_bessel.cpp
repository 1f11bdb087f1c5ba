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

#include "pnr/bessel.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using pnr::bessel_j1;

TEST_CASE("J1 landmarks") {
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK(std::abs(bessel_j1(oracle::kJ1FirstZero)) < 1e-14);
    CHECK(std::abs(bessel_j1(3.8317059702)) < 1e-9);
    CHECK(bessel_j1(oracle::kJ1MaxPosition) ==
          doctest::Approx(oracle::kJ1MaxValue).epsilon(1e-6));
}

TEST_CASE("the two test oracles agree with each other") {
    // Series (double-double) and integral (long-double trapezoid) routes are
    // independent of each other and of the implementation.
    for (int i = 0; i <= 500; ++i) {
        double x = 25.0 * i / 500.0;
        CHECK(std::abs(oracle::j1_series_dd(x) - oracle::j1_integral_ld(x)) < 1e-15);
    }
}

TEST_CASE("J1 matches the series oracle on |x| <= 25") {
    double max_err = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        double x = 25.0 * i / 5000.0;
        max_err = std::max(max_err, std::abs(bessel_j1(x) - oracle::j1_series_dd(x)));
    }
    CHECK(max_err < 1e-12);
    CHECK(max_err < 1e-13);  // regression guard; observed ~2e-14
}

TEST_CASE("J1 matches the integral oracle on |x| <= 50") {
    double max_err = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        double x = 50.0 * i / 5000.0;
        max_err = std::max(max_err, std::abs(bessel_j1(x) - oracle::j1_integral_ld(x)));
    }
    CHECK(max_err < 1e-12);
    CHECK(max_err < 1e-13);
}

TEST_CASE("J1 odd symmetry") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> dist(0.0, 60.0);
    for (int i = 0; i < 200; ++i) {
        double x = dist(gen);
        CHECK(bessel_j1(-x) == -bessel_j1(x));
    }
}

TEST_CASE("J1 large arguments") {
    for (double x : {60.0, 120.0, 333.3, 499.9, 500.1, 777.0, 2000.0}) {
        CHECK(std::abs(bessel_j1(x) - oracle::j1_integral_ld(x)) < 1e-12);
    }
    // Spot values from arbitrary-precision Bessel routines.
    CHECK(bessel_j1(100.0) == doctest::Approx(-0.077145352014112158).epsilon(1e-11));
    CHECK(bessel_j1(1000.0) == doctest::Approx(0.0047283119070895239).epsilon(1e-9));
    CHECK(bessel_j1(10000.0) == doctest::Approx(0.0036474507555295803).epsilon(1e-9));
}

TEST_CASE("J1 rejects non-finite input") {
    CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}
