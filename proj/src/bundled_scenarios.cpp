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

// The scenarios bundled into the binary. Kept byte-identical to the files
// under scenarios/ (a unit test enforces the match).

#include "pnr/scenario.hpp"

namespace pnr {
namespace {

constexpr const char* kFig1Slit = R"json({
  "schema": 1,
  "name": "fig1_slit",
  "title": "Single-slit fringe compression: per-k profiles and FWHM vs detected photon number",
  "experiment": "single-slit",
  "slit": {"width_m": 250e-6, "wavelength_m": 1550e-9, "screen_distance_m": 0.23},
  "source": {"family": "coherent", "mean": 3.6},
  "peak_mean": 3.6,
  "detection": {"k_max": 9},
  "scan": {"half_width_scales": 3.0, "step_m": 50e-6, "pulses_per_position": 100000, "seed": 1},
  "analysis": ["fwhm", "fit"]
}
)json";

constexpr const char* kFig2TwoBeam = R"json({
  "schema": 1,
  "name": "fig2_twobeam",
  "title": "Two-beam Airy contrast at and around the Rayleigh criterion",
  "experiment": "two-beam",
  "pinhole": {"aperture_d_m": 75e-6, "wavelength_m": 1550e-9, "focal_length_m": 0.1},
  "source": {"family": "coherent", "mean": 5.3},
  "beam_mean": 5.3,
  "imbalance": 1.0,
  "detection": {"k_max": 12},
  "separation_rayleigh": [0.85, 0.9, 0.95, 0.97, 1.0, 1.05, 1.1, 1.2, 1.3],
  "profile_separation_rayleigh": 1.0,
  "contrast_k": [4, 5, 6, 7, 8, 9, 10, 11, 12],
  "scan": {"half_width_scales": 3.0, "points": 401},
  "analysis": ["contrast", "sweep"]
}
)json";

constexpr const char* kFig3Stats = R"json({
  "schema": 1,
  "name": "fig3_stats",
  "title": "Conditioned Gaussian profiles for coherent, thermal and Fock sources",
  "experiment": "stats-compare",
  "gaussian": {"waist_m": 1.0e-3},
  "sources": [
    {"family": "coherent", "mean": 10.0},
    {"family": "thermal", "mean": 10.0},
    {"family": "fock", "n": 10}
  ],
  "peak_mean": 10.0,
  "detected_k": 10,
  "detection": {"k_max": 12},
  "scan": {"half_width_scales": 3.0, "points": 801},
  "analysis": ["fwhm"]
}
)json";

constexpr BundledScenario kBundled[] = {
    {"fig1_slit", kFig1Slit},
    {"fig2_twobeam", kFig2TwoBeam},
    {"fig3_stats", kFig3Stats},
};

}  // namespace

std::span<const BundledScenario> bundled_scenarios() { return kBundled; }

}  // namespace pnr
