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

#include "pnr/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "pnr/bessel.hpp"
#include "pnr/errors.hpp"
#include "pnr/kernels.hpp"

namespace pnr {
namespace {

void require_positive_finite(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw config_error(std::string(name) + " must be finite and strictly positive");
    }
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Golden-section maximization on [a, b]; the callers bracket a single local
// maximum with a coarse grid first.
template <typename F>
double golden_max(const F& f, double a, double b) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    const double tol = 1e-12 * (std::abs(a) + std::abs(b) + 1e-30);
    for (int i = 0; i < 200 && (b - a) > tol; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace

void SlitGeometry::validate() const {
    require_positive_finite(slit_width_m, "slit_width_m");
    require_positive_finite(wavelength_m, "wavelength_m");
    require_positive_finite(screen_distance_m, "screen_distance_m");
}

void PinholeGeometry::validate() const {
    require_positive_finite(aperture_d_m, "aperture_d_m");
    require_positive_finite(wavelength_m, "wavelength_m");
    require_positive_finite(focal_length_m, "focal_length_m");
}

double rayleigh_separation(const PinholeGeometry& g) {
    g.validate();
    return 1.22 * g.wavelength_m * g.focal_length_m / g.aperture_d_m;
}

double slit_sinc2(double x, const SlitGeometry& g) {
    g.validate();
    if (!std::isfinite(x)) throw std::domain_error("slit_sinc2: non-finite position");
    return kernels::sinc2(x * g.u_per_m());
}

double airy(double rho, const PinholeGeometry& g) {
    g.validate();
    if (!std::isfinite(rho) || rho < 0.0) {
        throw std::domain_error("airy: radial distance must be finite and >= 0");
    }
    const double u = rho * g.u_per_m();
    if (u < 1e-8) {
        // 2 J1(u)/u = 1 - u^2/8 + O(u^4)
        const double t = 1.0 - u * u / 8.0;
        return t * t;
    }
    const double t = 2.0 * bessel_j1(u) / u;
    return t * t;
}

double gaussian(double x, double waist) {
    require_positive_finite(waist, "waist");
    if (!std::isfinite(x)) throw std::domain_error("gaussian: non-finite position");
    return std::exp(-2.0 * x * x / (waist * waist));
}

IrradianceProfile IrradianceProfile::slit(const SlitGeometry& g) {
    g.validate();
    IrradianceProfile p;
    p.kind_ = ProfileKind::slit_sinc2;
    p.slit_ = g;
    p.x_hi_ = 3.0 * g.first_null_m();
    p.x_lo_ = -p.x_hi_;
    return p;
}

IrradianceProfile IrradianceProfile::airy_disk(const PinholeGeometry& g) {
    g.validate();
    IrradianceProfile p;
    p.kind_ = ProfileKind::airy;
    p.pinhole_ = g;
    p.x_hi_ = 3.0 * rayleigh_separation(g);
    p.x_lo_ = -p.x_hi_;
    return p;
}

IrradianceProfile IrradianceProfile::gaussian_beam(double waist_m) {
    require_positive_finite(waist_m, "waist_m");
    IrradianceProfile p;
    p.kind_ = ProfileKind::gaussian;
    p.waist_m_ = waist_m;
    p.x_hi_ = 3.0 * waist_m;
    p.x_lo_ = -p.x_hi_;
    return p;
}

IrradianceProfile IrradianceProfile::two_beam(const IrradianceProfile& base,
                                              double separation_m, double imbalance) {
    if (base.kind_ == ProfileKind::two_beam || base.kind_ == ProfileKind::tabulated) {
        throw config_error("two_beam base must be a single-beam analytic profile");
    }
    if (!std::isfinite(separation_m) || separation_m < 0.0) {
        throw config_error("two_beam separation must be finite and >= 0");
    }
    if (!std::isfinite(imbalance) || imbalance <= 0.0 || imbalance > 1.0) {
        throw config_error("two_beam imbalance must be in (0, 1]");
    }
    IrradianceProfile p = base;
    p.kind_ = ProfileKind::two_beam;
    p.base_kind_ = base.kind_;
    p.separation_m_ = separation_m;
    p.imbalance_ = imbalance;
    p.x_lo_ = base.x_lo_ - 0.5 * separation_m;
    p.x_hi_ = base.x_hi_ + 0.5 * separation_m;

    // Peak normalization: global max of the unnormalized sum over the domain,
    // located on a fine grid and polished by golden section.
    const int n = 4096;
    const double dx = (p.x_hi_ - p.x_lo_) / n;
    auto sum = [&p](double x) { return p.unnormalized_sum(x); };
    double best = -1.0;
    int best_i = 0;
    for (int i = 0; i <= n; ++i) {
        const double v = sum(p.x_lo_ + i * dx);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double lo = p.x_lo_ + std::max(0, best_i - 1) * dx;
    const double hi = p.x_lo_ + std::min(n, best_i + 1) * dx;
    p.norm_ = golden_max(sum, lo, hi);
    return p;
}

IrradianceProfile IrradianceProfile::tabulated(std::vector<double> x, std::vector<double> t2) {
    if (x.size() != t2.size() || x.size() < 2) {
        throw config_error("tabulated profile needs >= 2 matching samples");
    }
    double peak = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(t2[i]) || t2[i] < 0.0) {
            throw config_error("tabulated profile samples must be finite with t2 >= 0");
        }
        if (i > 0 && x[i] <= x[i - 1]) {
            throw config_error("tabulated profile positions must be strictly increasing");
        }
        peak = std::max(peak, t2[i]);
    }
    if (peak <= 0.0) throw config_error("tabulated profile is identically zero");
    for (double& v : t2) v /= peak;

    IrradianceProfile p;
    p.kind_ = ProfileKind::tabulated;
    p.x_lo_ = x.front();
    p.x_hi_ = x.back();
    p.tab_x_ = std::move(x);
    p.tab_t2_ = std::move(t2);
    return p;
}

double IrradianceProfile::base_value(double x) const {
    switch (kind_ == ProfileKind::two_beam ? base_kind_ : kind_) {
        case ProfileKind::slit_sinc2:
            return kernels::sinc2(x * slit_.u_per_m());
        case ProfileKind::airy: {
            const double u = std::abs(x) * pinhole_.u_per_m();
            if (u < 1e-8) {
                const double t = 1.0 - u * u / 8.0;
                return t * t;
            }
            const double t = 2.0 * bessel_j1(u) / u;
            return t * t;
        }
        case ProfileKind::gaussian:
            return std::exp(-2.0 * x * x / (waist_m_ * waist_m_));
        default:
            break;
    }
    throw numeric_error("base_value: unsupported profile kind");
}

double IrradianceProfile::unnormalized_sum(double x) const {
    if (kind_ != ProfileKind::two_beam) return value(x);
    return base_value(x - 0.5 * separation_m_) + imbalance_ * base_value(x + 0.5 * separation_m_);
}

double IrradianceProfile::value(double x) const {
    switch (kind_) {
        case ProfileKind::slit_sinc2:
        case ProfileKind::airy:
        case ProfileKind::gaussian:
            return clamp01(base_value(x));
        case ProfileKind::two_beam:
            return clamp01(unnormalized_sum(x) / norm_);
        case ProfileKind::tabulated: {
            if (x <= tab_x_.front()) return tab_t2_.front();
            if (x >= tab_x_.back()) return tab_t2_.back();
            const auto it = std::upper_bound(tab_x_.begin(), tab_x_.end(), x);
            const size_t i = static_cast<size_t>(it - tab_x_.begin());
            const double f = (x - tab_x_[i - 1]) / (tab_x_[i] - tab_x_[i - 1]);
            return clamp01(tab_t2_[i - 1] + f * (tab_t2_[i] - tab_t2_[i - 1]));
        }
    }
    throw numeric_error("value: unsupported profile kind");
}

void IrradianceProfile::evaluate_base(std::span<const double> x, std::span<double> out) const {
    switch (kind_ == ProfileKind::two_beam ? base_kind_ : kind_) {
        case ProfileKind::slit_sinc2:
            kernels::slit_sinc2_grid(x, slit_.u_per_m(), out);
            return;
        case ProfileKind::gaussian:
            kernels::gaussian_grid(x, waist_m_, out);
            return;
        default:
            for (size_t i = 0; i < x.size(); ++i) out[i] = base_value(x[i]);
            return;
    }
}

void IrradianceProfile::evaluate(std::span<const double> x, std::span<double> out) const {
    if (x.size() != out.size()) {
        throw config_error("evaluate: input and output spans must have equal size");
    }
    switch (kind_) {
        case ProfileKind::slit_sinc2:
            kernels::slit_sinc2_grid(x, slit_.u_per_m(), out);
            return;
        case ProfileKind::gaussian:
            kernels::gaussian_grid(x, waist_m_, out);
            return;
        case ProfileKind::two_beam: {
            std::vector<double> shifted(x.size());
            std::vector<double> left(x.size());
            for (size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] - 0.5 * separation_m_;
            evaluate_base(shifted, left);
            for (size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 0.5 * separation_m_;
            evaluate_base(shifted, out);
            const double inv_norm = 1.0 / norm_;
            for (size_t i = 0; i < x.size(); ++i) {
                out[i] = clamp01((left[i] + imbalance_ * out[i]) * inv_norm);
            }
            return;
        }
        default:
            for (size_t i = 0; i < x.size(); ++i) out[i] = value(x[i]);
            return;
    }
}

std::vector<double> IrradianceProfile::evaluate(std::span<const double> x) const {
    std::vector<double> out(x.size());
    evaluate(x, out);
    return out;
}

double IrradianceProfile::feature_scale() const {
    switch (kind_) {
        case ProfileKind::slit_sinc2:
            return slit_.first_null_m();
        case ProfileKind::airy:
            return rayleigh_separation(pinhole_);
        case ProfileKind::gaussian:
            return waist_m_;
        case ProfileKind::two_beam: {
            IrradianceProfile base = *this;
            base.kind_ = base_kind_;
            return base.feature_scale() + 0.5 * separation_m_;
        }
        case ProfileKind::tabulated:
            return 0.5 * (x_hi_ - x_lo_);
    }
    throw numeric_error("feature_scale: unsupported profile kind");
}

IrradianceProfile IrradianceProfile::with_domain(double lo, double hi) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi) {
        throw config_error("with_domain: require finite lo < hi");
    }
    if (kind_ == ProfileKind::two_beam) {
        IrradianceProfile base = *this;
        base.kind_ = base_kind_;
        base.x_lo_ = lo + 0.5 * separation_m_;
        base.x_hi_ = hi - 0.5 * separation_m_;
        if (base.x_lo_ >= base.x_hi_) {
            base.x_lo_ = lo;
            base.x_hi_ = hi;
        }
        return two_beam(base, separation_m_, imbalance_);
    }
    IrradianceProfile p = *this;
    p.x_lo_ = lo;
    p.x_hi_ = hi;
    return p;
}

}  // namespace pnr
