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

namespace pnr::kernels::detail {

void gaussian_grid_scalar(std::span<const double> x, double waist, std::span<double> out);
void slit_sinc2_grid_scalar(std::span<const double> x, double u_per_m, std::span<double> out);
void beamsplitter_grid_scalar(std::span<const double> source_pmf, int k,
                              std::span<const double> t2, std::span<double> out);

#if defined(PNR_HAVE_AVX2)
void gaussian_grid_avx2(std::span<const double> x, double waist, std::span<double> out);
void slit_sinc2_grid_avx2(std::span<const double> x, double u_per_m, std::span<double> out);
void beamsplitter_grid_avx2(std::span<const double> source_pmf, int k,
                            std::span<const double> t2, std::span<double> out);
#endif

}  // namespace pnr::kernels::detail
