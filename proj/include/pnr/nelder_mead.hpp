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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace pnr {

struct NelderMeadOptions {
    int max_iterations = 500;
    double relative_tolerance = 1e-9;  // simplex diameter, relative to the best vertex
};

struct NelderMeadResult {
    std::vector<double> parameters;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free downhill-simplex minimization with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> initial, std::span<const double> step,
    const NelderMeadOptions& opt = {}) {
    const size_t n = initial.size();
    std::vector<std::vector<double>> x(n + 1, std::vector<double>(initial.begin(), initial.end()));
    for (size_t i = 0; i < n; ++i) x[i + 1][i] += step[i];

    std::vector<double> fx(n + 1);
    for (size_t i = 0; i <= n; ++i) fx[i] = f(x[i]);

    auto order = [&]() {
        for (size_t i = 1; i <= n; ++i) {  // insertion sort, simplex is tiny
            auto xi = std::move(x[i]);
            double fi = fx[i];
            size_t j = i;
            for (; j > 0 && fx[j - 1] > fi; --j) {
                x[j] = std::move(x[j - 1]);
                fx[j] = fx[j - 1];
            }
            x[j] = std::move(xi);
            fx[j] = fi;
        }
    };

    auto diameter_converged = [&]() {
        for (size_t d = 0; d < n; ++d) {
            double lo = x[0][d], hi = x[0][d];
            for (size_t i = 1; i <= n; ++i) {
                lo = std::min(lo, x[i][d]);
                hi = std::max(hi, x[i][d]);
            }
            if (hi - lo > opt.relative_tolerance * std::max(1.0, std::abs(x[0][d]))) {
                return false;
            }
        }
        return true;
    };

    NelderMeadResult result;
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        order();
        if (diameter_converged()) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            for (size_t d = 0; d < n; ++d) centroid[d] += x[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](const std::vector<double>& from, double coeff) {
            std::vector<double> p(n);
            for (size_t d = 0; d < n; ++d) p[d] = centroid[d] + coeff * (centroid[d] - from[d]);
            return p;
        };

        const auto reflected = blend(x[n], 1.0);
        const double fr = f(reflected);
        if (fr < fx[0]) {
            const auto expanded = blend(x[n], 2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                x[n] = expanded;
                fx[n] = fe;
            } else {
                x[n] = reflected;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            x[n] = reflected;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const auto contracted = blend(x[n], outside ? 0.5 : -0.5);
            const double fc = f(contracted);
            if (fc < (outside ? fr : fx[n])) {
                x[n] = contracted;
                fx[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {  // shrink toward the best vertex
                    for (size_t d = 0; d < n; ++d) {
                        x[i][d] = x[0][d] + 0.5 * (x[i][d] - x[0][d]);
                    }
                    fx[i] = f(x[i]);
                }
            }
        }
    }

    order();
    result.parameters = x[0];
    result.value = fx[0];
    result.iterations = iter;
    return result;
}

}  // namespace pnr
