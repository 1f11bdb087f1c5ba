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
#include <vector>

namespace pnr {

/// Single-slit far-field geometry. All lengths in meters.
struct SlitGeometry {
    double slit_width_m = 0.0;
    double wavelength_m = 0.0;
    double screen_distance_m = 0.0;

    void validate() const;  // throws config_error unless all fields are finite and > 0

    /// Transverse distance to the first diffraction null, lambda z / d.
    double first_null_m() const { return wavelength_m * screen_distance_m / slit_width_m; }
    /// u-units (argument of sinc^2) per meter of transverse position.
    double u_per_m() const { return slit_width_m / (wavelength_m * screen_distance_m); }
};

/// Pinhole + imaging lens geometry. D is the pinhole diameter: the formulas
/// used here (first Airy zero, Rayleigh separation 1.22 lambda f / D) are the
/// standard diameter-based ones.
struct PinholeGeometry {
    double aperture_d_m = 0.0;
    double wavelength_m = 0.0;
    double focal_length_m = 0.0;

    void validate() const;

    /// Radians of Airy argument per meter in the image plane, pi D / (lambda f).
    double u_per_m() const {
        return 3.14159265358979323846 * aperture_d_m / (wavelength_m * focal_length_m);
    }
};

/// Rayleigh two-point separation in the image plane, 1.22 lambda f / D.
double rayleigh_separation(const PinholeGeometry& g);

/// sinc^2(d x / (lambda z)): normalized single-slit transmission at transverse
/// position x, with the small-angle mapping theta = x/z folded in.
double slit_sinc2(double x, const SlitGeometry& g);

/// (2 J1(u)/u)^2 at u = pi D rho / (lambda f); rho >= 0 (radial distance).
double airy(double rho, const PinholeGeometry& g);

/// exp(-2 x^2 / w^2): Gaussian beam with 1/e^2 irradiance waist w.
double gaussian(double x, double waist);

enum class ProfileKind { slit_sinc2, airy, gaussian, two_beam, tabulated };

/// A normalized spatial transmission map T^2(x) in [0,1] over an evaluation
/// domain. Single-beam kinds peak at exactly 1 at their center; the two-beam
/// kind is the non-interfering sum of two shifted copies of a single-beam
/// base, rescaled so its global maximum over the domain is 1.
class IrradianceProfile {
public:
    static IrradianceProfile slit(const SlitGeometry& g);
    static IrradianceProfile airy_disk(const PinholeGeometry& g);
    static IrradianceProfile gaussian_beam(double waist_m);
    /// base(x - s/2) + r * base(x + s/2), renormalized. The base must be a
    /// single-beam analytic kind. s >= 0, 0 < r <= 1.
    static IrradianceProfile two_beam(const IrradianceProfile& base, double separation_m,
                                      double imbalance);
    /// Piecewise-linear profile through (x, t2) samples, rescaled to peak 1.
    static IrradianceProfile tabulated(std::vector<double> x, std::vector<double> t2);

    /// Normalized transmission at x, clamped to [0,1].
    double value(double x) const;

    /// For two-beam profiles, the unnormalized base(x-s/2) + r*base(x+s/2)
    /// (used to express detected means per beam); equals value() otherwise.
    double unnormalized_sum(double x) const;

    /// Grid evaluation of value(); dispatches to the vector kernels for the
    /// kinds with a data-parallel form.
    void evaluate(std::span<const double> x, std::span<double> out) const;
    std::vector<double> evaluate(std::span<const double> x) const;

    ProfileKind kind() const { return kind_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }

    /// Characteristic width used for default domains: first-null distance for
    /// slit and Airy, the waist for Gaussian, (base scale + s/2) for two-beam.
    double feature_scale() const;

    /// Two-beam peak normalization constant (global max of the unnormalized
    /// sum); 1 for all other kinds.
    double peak_normalization() const { return norm_; }

    double separation_m() const { return separation_m_; }
    double imbalance() const { return imbalance_; }

    IrradianceProfile with_domain(double lo, double hi) const;

private:
    IrradianceProfile() = default;

    double base_value(double x) const;  // single-beam value, peak 1 at x = 0
    void evaluate_base(std::span<const double> x, std::span<double> out) const;

    ProfileKind kind_ = ProfileKind::gaussian;
    ProfileKind base_kind_ = ProfileKind::gaussian;  // two-beam only
    SlitGeometry slit_{};
    PinholeGeometry pinhole_{};
    double waist_m_ = 0.0;
    double separation_m_ = 0.0;
    double imbalance_ = 1.0;
    double norm_ = 1.0;
    double x_lo_ = 0.0;
    double x_hi_ = 0.0;
    std::vector<double> tab_x_;
    std::vector<double> tab_t2_;
};

}  // namespace pnr
