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

#include "pnr/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

namespace k = pnr::kernels;

namespace {

std::vector<double> random_grid(size_t n, double lo, double hi, uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (double& v : out) v = dist(gen);
    return out;
}

// Poisson source table built independently of the library (plain loop).
std::vector<double> poisson_table(double mu, int n) {
    std::vector<double> p(n);
    p[0] = std::exp(-mu);
    for (int j = 1; j < n; ++j) p[j] = p[j - 1] * mu / j;
    return p;
}

}  // namespace

TEST_CASE("backend plumbing") {
    CHECK(k::backend_available(k::Backend::scalar));
    const k::Backend active = k::active_backend();
    CHECK(k::backend_available(active));
    CHECK((std::string(k::backend_name(active)) == "scalar" ||
           std::string(k::backend_name(active)) == "avx2"));
}

TEST_CASE("sinc2 point values") {
    CHECK(k::sinc2(0.0) == 1.0);
    CHECK(k::sinc2(1.0) == 0.0);   // exact null via exact integer reduction
    CHECK(k::sinc2(-3.0) == 0.0);
    CHECK(k::sinc2(17.0) == 0.0);
    CHECK(k::sinc2(0.5) == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-14));
    CHECK(k::sinc2(oracle::kSincHalfMaxU) == doctest::Approx(0.5).epsilon(1e-12));
    // even
    for (double u : {0.3, 1.7, 2.2, 9.9}) CHECK(k::sinc2(u) == k::sinc2(-u));
}

TEST_CASE("scalar kernels match plain formulas") {
    const auto x = random_grid(303, -5e-3, 5e-3, 42);
    std::vector<double> out(x.size());

    k::gaussian_grid(x, 1.3e-3, out, k::Backend::scalar);
    for (size_t i = 0; i < x.size(); ++i) {
        CHECK(out[i] == doctest::Approx(std::exp(-2.0 * x[i] * x[i] / (1.3e-3 * 1.3e-3)))
                            .epsilon(1e-15));
    }

    k::slit_sinc2_grid(x, 701.2, out, k::Backend::scalar);
    for (size_t i = 0; i < x.size(); ++i) {
        double u = x[i] * 701.2;
        double ref = u == 0.0 ? 1.0 : std::pow(std::sin(M_PI * u) / (M_PI * u), 2);
        CHECK(out[i] == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("beamsplitter point recurrence equals explicit binomial summation") {
    // Independent route: lgamma-based binomial coefficients, term by term.
    auto direct = [](const std::vector<double>& pmf, int kk, double t2) {
        double acc = 0.0;
        for (int j = kk; j < static_cast<int>(pmf.size()); ++j) {
            double logc = std::lgamma(j + 1.0) - std::lgamma(kk + 1.0) -
                          std::lgamma(j - kk + 1.0);
            acc += pmf[j] * std::exp(logc) * std::pow(t2, kk) *
                   std::pow(1.0 - t2, j - kk);
        }
        return acc;
    };
    const auto pmf = poisson_table(4.2, 60);
    for (int kk : {0, 1, 3, 7, 12}) {
        for (double t2 : {0.0, 0.12, 0.5, 0.93, 1.0}) {
            CHECK(k::beamsplitter_point(pmf, kk, t2) ==
                  doctest::Approx(direct(pmf, kk, t2)).epsilon(1e-11));
        }
    }
    // k beyond the table is an empty sum
    CHECK(k::beamsplitter_point(pmf, 60, 0.5) == 0.0);
}

TEST_CASE("avx2 lane equivalence" * doctest::skip(!k::backend_available(k::Backend::avx2))) {
    const size_t n = 1001;  // odd size exercises the scalar remainder
    std::vector<double> a(n), b(n);

    SUBCASE("gaussian") {
        const auto x = random_grid(n, -6e-3, 6e-3, 7);
        k::gaussian_grid(x, 2.1e-3, a, k::Backend::scalar);
        k::gaussian_grid(x, 2.1e-3, b, k::Backend::avx2);
        for (size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
    }

    SUBCASE("slit sinc2") {
        const auto x = random_grid(n, -8e-3, 8e-3, 8);
        k::slit_sinc2_grid(x, 701.2, a, k::Backend::scalar);
        k::slit_sinc2_grid(x, 701.2, b, k::Backend::avx2);
        for (size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
        // exact nulls survive vectorization
        std::vector<double> nulls = {1.0, -2.0, 5.0, 12.0, 3.0, -7.0, 2.0, 9.0};
        std::vector<double> nv(nulls.size());
        k::slit_sinc2_grid(nulls, 1.0, nv, k::Backend::avx2);
        for (double v : nv) CHECK(v == 0.0);
    }

    SUBCASE("beamsplitter") {
        const auto pmf = poisson_table(5.3, 70);
        const auto t2 = random_grid(n, 0.0, 1.0, 9);
        for (int kk : {0, 2, 5, 12, 40}) {
            k::beamsplitter_grid(pmf, kk, t2, a, k::Backend::scalar);
            k::beamsplitter_grid(pmf, kk, t2, b, k::Backend::avx2);
            for (size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
        }
    }

    SUBCASE("grid matches point evaluation") {
        const auto pmf = poisson_table(3.6, 50);
        const auto t2 = random_grid(n, 0.0, 1.0, 10);
        k::beamsplitter_grid(pmf, 9, t2, b, k::Backend::avx2);
        for (size_t i = 0; i < n; ++i) {
            CHECK(std::abs(b[i] - k::beamsplitter_point(pmf, 9, t2[i])) < 1e-14);
        }
    }
}
