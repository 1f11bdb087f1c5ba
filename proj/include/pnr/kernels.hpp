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

#include <span>

namespace pnr::kernels {

// The grid kernels below are the arithmetic inner loops of the analytic
// pipelines. Each has a scalar reference implementation and, on x86-64
// machines with AVX2+FMA, a vectorized variant selected at runtime. The two
// lanes are equivalence-tested against each other; results agree to well
// below every tolerance used elsewhere in the project.

enum class Backend { scalar, avx2 };

/// Backend used by the default-dispatch entry points. Picked once per process
/// from cpuid; the environment variable PNR_SCOPE_KERNELS ("scalar" or
/// "avx2") overrides the choice where available.
Backend active_backend();

bool backend_available(Backend backend);
const char* backend_name(Backend backend);

/// out[i] = exp(-2 x[i]^2 / waist^2)
void gaussian_grid(std::span<const double> x, double waist, std::span<double> out,
                   Backend backend);
void gaussian_grid(std::span<const double> x, double waist, std::span<double> out);

/// out[i] = sinc^2(x[i] * u_per_m) with sinc(u) = sin(pi u)/(pi u)
void slit_sinc2_grid(std::span<const double> x, double u_per_m, std::span<double> out,
                     Backend backend);
void slit_sinc2_grid(std::span<const double> x, double u_per_m, std::span<double> out);

/// Direct beamsplitter summation over a truncated source distribution:
///   out[i] = sum_{j>=k} source_pmf[j] * C(j,k) * t2[i]^k * (1-t2[i])^(j-k)
/// evaluated by a ratio recurrence (no standalone binomial coefficients).
/// Requires every t2[i] in [0, 1].
void beamsplitter_grid(std::span<const double> source_pmf, int k,
                       std::span<const double> t2, std::span<double> out,
                       Backend backend);
void beamsplitter_grid(std::span<const double> source_pmf, int k,
                       std::span<const double> t2, std::span<double> out);

/// Scalar single-point form of beamsplitter_grid; the reference lane loops
/// over this function, so point and grid evaluations agree exactly on the
/// scalar backend.
double beamsplitter_point(std::span<const double> source_pmf, int k, double t2);

/// sinc^2 with the removable singularity handled; exact zeros at nonzero
/// integer u.
double sinc2(double u);

}  // namespace pnr::kernels
