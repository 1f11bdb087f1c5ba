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

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pnr/photon_stats.hpp"
#include "pnr/profiles.hpp"

namespace pnr {

using Curve = std::function<double(double)>;

struct FwhmResult {
    double fwhm = 0.0;
    double peak_x = 0.0;
    double peak_value = 0.0;
    double left_x = 0.0;
    double right_x = 0.0;
    // Set when the central lobe holds more than one half-max region (the
    // coherent k < mu case); the width then spans the outermost crossings.
    bool multimodal = false;
};

/// Full width at half maximum of a curve on [x_lo, x_hi]: global maximum on a
/// fine grid refined by golden section, then an outward walk to the half-max
/// crossings with linear interpolation between samples. Throws numeric_error
/// when the curve has no positive peak or a crossing is missing.
FwhmResult fwhm(const Curve& curve, double x_lo, double x_hi, int grid_points = 4096);

/// Same walk on sampled data (no refinement beyond linear interpolation).
FwhmResult fwhm_sampled(std::span<const double> x, std::span<const double> y);

/// fwhm(curve_b) / fwhm(curve_a): > 1 means curve_a is the narrower one.
double compression_factor(const Curve& curve_a, const Curve& curve_b, double x_lo,
                          double x_hi);

struct ContrastReport {
    double i_max = 0.0;
    double i_saddle = 0.0;
    double contrast = 0.0;  // (i_max - i_saddle) / (i_max + i_saddle)
    double peak_x = 0.0;
    double saddle_x = 0.0;
    double separation_m = 0.0;
    double separation_rayleigh = 0.0;
    // No interior dip between the per-side maxima (separation below the
    // Sparrow limit); contrast is reported as 0.
    bool no_dip = false;
};

/// Peak/saddle contrast of a two-beam curve: the peak is the global maximum,
/// the saddle the deepest interior minimum between the per-side maxima.
/// separation_m <= 0 (a single-beam scenario) is a configuration error.
ContrastReport contrast(const Curve& curve, double separation_m,
                        double search_halfwidth_m, double rayleigh_m);

/// Contrast from sampled data, read at the grid points nearest the analytic
/// peak and saddle positions (no smoothing).
ContrastReport contrast_from_samples(std::span<const double> x, std::span<const double> y,
                                     const ContrastReport& analytic);

struct ContrastSweepRow {
    double s_rayleigh = 0.0;
    double s_m = 0.0;
    double c_classical = 0.0;
    double c_spd = 0.0;
    std::vector<double> c_k;  // aligned with the sweep's k list
    bool no_dip = false;
};

/// Separation sweep: contrast of the classical, SPD and per-k curves for
/// two equal beams at each separation (in Rayleigh units).
std::vector<ContrastSweepRow> contrast_sweep(const SourceStatistics& src,
                                             const PinholeGeometry& g, double beam_mean,
                                             std::span<const int> k_list,
                                             std::span<const double> s_rayleigh_list);

/// Separation at which the equal-beam summed profile turns flat-topped: root
/// of the midpoint curvature. Throws numeric_error on bracketing failure.
double sparrow_separation(const IrradianceProfile& base, double s_lo_m, double s_hi_m);

struct SparrowResult {
    double separation_m = 0.0;
    double separation_rayleigh = 0.0;
};

SparrowResult sparrow_limit(const PinholeGeometry& g);

enum class FitModel { slit, two_beam };

struct FitOptions {
    DetectionMode mode = DetectionMode::classical_mean;
    int k = 0;  // detected photon number for number-resolving fits
    SourceFamily family = SourceFamily::coherent;
    int max_iterations = 500;
    double relative_tolerance = 1e-9;
};

struct FitResult {
    std::vector<double> parameters;
    std::vector<std::string> parameter_names;
    double residual_sum_squares = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Least-squares fit of mu * sinc^2(scale (x - center)) through the chosen
/// detection transform. Parameters {mu, scale, center}.
FitResult fit_slit_profile(std::span<const double> x, std::span<const double> y,
                           const FitOptions& options, std::array<double, 3> initial);

/// Least-squares fit of the two-beam Airy model
///   mu_beam [A(x - c - s/2) + r A((x - c + s/2)/width_scale)]
/// with A the geometry's Airy profile. Parameters
/// {mu_beam, separation, imbalance, center, width_scale}; the width scale of
/// the second beam stands in for the arms' path-length difference.
FitResult fit_two_beam_profile(std::span<const double> x, std::span<const double> y,
                               const PinholeGeometry& g, const FitOptions& options,
                               std::array<double, 5> initial);

}  // namespace pnr
