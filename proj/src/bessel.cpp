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
#include <stdexcept>

namespace pnr {
namespace {

// Ascending power series J1(x) = (x/2) sum_m (-1)^m (x^2/4)^m / (m!(m+1)!).
// For |x| < 8 the largest term is ~30, so cancellation costs at most a couple
// of digits and the absolute error stays near 1e-14.
double j1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 64; ++m) {
        term *= -q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return 0.5 * x * sum;
}

// Backward (Miller) recurrence normalized with the Neumann sum
// J0 + 2*(J2 + J4 + ...) = 1. Accurate to near machine precision for
// moderate arguments, where the Hankel expansion has not yet converged.
double j1_miller(double x) {
    const int start = static_cast<int>(x + 16.0 * std::cbrt(x) + 40.0);
    double jnext = 0.0;        // J_{m+1}
    double jcur = 1e-30;       // J_m (arbitrary seed, fixed by normalization)
    double j1 = 0.0;
    double norm = 0.0;
    for (int m = start; m >= 1; --m) {
        const double jprev = (2.0 * m / x) * jcur - jnext;  // J_{m-1}
        jnext = jcur;
        jcur = jprev;
        if (m - 1 == 1) j1 = jcur;
        if ((m - 1) % 2 == 0) norm += 2.0 * jcur;
        if (std::abs(jcur) > 1e250) {
            jcur *= 1e-250;
            jnext *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm -= jcur;  // J0 enters the Neumann sum with weight 1, not 2
    return j1 / norm;
}

// Hankel asymptotic expansion, three terms of P and Q. Only used for very
// large arguments where its truncation error is negligible.
double j1_asymptotic(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double p = 1.0 + inv2 * (15.0 / 128.0 - inv2 * 4725.0 / 32768.0);
    const double q = inv * (3.0 / 8.0 - inv2 * 105.0 / 1024.0);
    const double chi = x - 2.356194490192344929;  // 3*pi/4
    return std::sqrt(2.0 / (3.14159265358979323846 * x)) *
           (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("bessel_j1: non-finite argument");
    }
    const double ax = std::abs(x);
    double value;
    if (ax < 8.0) {
        value = j1_series(ax);
    } else if (ax <= 500.0) {
        value = j1_miller(ax);
    } else {
        value = j1_asymptotic(ax);
    }
    return x < 0.0 ? -value : value;
}

}  // namespace pnr
