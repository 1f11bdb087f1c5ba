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

#include "pnr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnr/errors.hpp"
#include "pnr/kernels.hpp"
#include "pnr/nelder_mead.hpp"

namespace pnr {
namespace {

constexpr double kGoldenInv = 0.6180339887498949;

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

template <typename F>
Extremum golden_extremum(const F& f, double a, double b, bool maximize) {
    const double sign = maximize ? 1.0 : -1.0;
    double x1 = b - kGoldenInv * (b - a);
    double x2 = a + kGoldenInv * (b - a);
    double f1 = sign * f(x1);
    double f2 = sign * f(x2);
    const double tol = 1e-11 * (std::abs(a) + std::abs(b) + 1e-30);
    for (int i = 0; i < 200 && (b - a) > tol; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenInv * (b - a);
            f2 = sign * f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenInv * (b - a);
            f1 = sign * f(x1);
        }
    }
    if (f1 >= f2) return {x1, sign * f1};
    return {x2, sign * f2};
}

// One-sided walk from the peak to the half-max crossings. Keeps the outermost
// downward crossing within the central lobe (the walk stops once the curve has
// decayed to stop_level) and reports whether more than one crossing was seen.
struct WalkOutcome {
    double crossing = 0.0;
    int crossings_seen = 0;
    bool found = false;
};

WalkOutcome walk_to_half(std::span<const double> xs, std::span<const double> ys,
                         size_t peak_index, double half, double stop_level, int dir) {
    WalkOutcome out;
    const auto n = static_cast<long>(xs.size());
    long i = static_cast<long>(peak_index);
    for (long j = i + dir; j >= 0 && j < n; j += dir) {
        const double y_prev = ys[j - dir];
        const double y_next = ys[j];
        const bool down = y_prev >= half && y_next < half;
        const bool up = y_prev < half && y_next >= half;
        if (down || up) {
            ++out.crossings_seen;
            if (down) {
                const double x_prev = xs[j - dir];
                const double x_next = xs[j];
                out.crossing =
                    x_prev + (half - y_prev) * (x_next - x_prev) / (y_next - y_prev);
                out.found = true;
            }
        }
        if (y_next < stop_level && y_next < half) break;
    }
    return out;
}

FwhmResult fwhm_from_samples(std::span<const double> xs, std::span<const double> ys,
                             double peak_x, double peak_value, size_t peak_index) {
    if (!(peak_value > 0.0)) {
        throw numeric_error("fwhm: curve has no positive peak");
    }
    const double half = 0.5 * peak_value;
    const double stop_level = 1e-3 * peak_value;

    const WalkOutcome right = walk_to_half(xs, ys, peak_index, half, stop_level, +1);
    const WalkOutcome left = walk_to_half(xs, ys, peak_index, half, stop_level, -1);
    if (!right.found || !left.found) {
        throw numeric_error("fwhm: half-max crossing not found inside the domain");
    }

    FwhmResult result;
    result.peak_x = peak_x;
    result.peak_value = peak_value;
    result.left_x = left.crossing;
    result.right_x = right.crossing;
    result.fwhm = right.crossing - left.crossing;
    result.multimodal = right.crossings_seen > 1 || left.crossings_seen > 1;
    return result;
}

double detected_value(double mean, const FitOptions& options) {
    switch (options.mode) {
        case DetectionMode::classical_mean:
            return mean;
        case DetectionMode::single_photon:
            return options.family == SourceFamily::thermal
                       ? 1.0 - thermal_pmf(mean, 0)
                       : 1.0 - poisson_pmf(mean, 0);
        case DetectionMode::number_resolving:
            return options.family == SourceFamily::thermal
                       ? thermal_pmf(mean, options.k)
                       : poisson_pmf(mean, options.k);
    }
    throw numeric_error("fit: unknown detection mode");
}

struct Bound {
    double lo;
    double hi;
};

FitResult run_fit(const std::function<double(std::span<const double>, double)>& model,
                  std::span<const double> x, std::span<const double> y,
                  std::span<const Bound> bounds, std::vector<std::string> names,
                  std::span<const double> initial, std::span<const double> step,
                  const FitOptions& options) {
    if (x.size() != y.size()) {
        throw config_error("fit: x and y sizes differ");
    }
    if (x.size() < 2 * initial.size()) {
        throw config_error("fit: need at least twice as many data points as parameters");
    }
    if (options.family == SourceFamily::fock &&
        options.mode != DetectionMode::classical_mean) {
        throw config_error("fit: fock detection models are not supported");
    }

    auto objective = [&](std::span<const double> p) {
        double violation = 0.0;
        for (size_t i = 0; i < p.size(); ++i) {
            if (p[i] < bounds[i].lo) violation += bounds[i].lo - p[i];
            if (p[i] > bounds[i].hi) violation += p[i] - bounds[i].hi;
        }
        if (violation > 0.0) {
            return 1e100 * (1.0 + violation);
        }
        double ssr = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            const double d = model(p, x[i]) - y[i];
            ssr += d * d;
        }
        return ssr;
    };

    NelderMeadOptions nm;
    nm.max_iterations = options.max_iterations;
    nm.relative_tolerance = options.relative_tolerance;
    const NelderMeadResult r = nelder_mead(objective, initial, step, nm);

    FitResult result;
    result.parameters = r.parameters;
    result.parameter_names = std::move(names);
    result.residual_sum_squares = r.value;
    result.iterations = r.iterations;
    result.converged = r.converged;
    return result;
}

}  // namespace

FwhmResult fwhm(const Curve& curve, double x_lo, double x_hi, int grid_points) {
    if (!(x_hi > x_lo) || grid_points < 16) {
        throw config_error("fwhm: invalid domain or grid");
    }
    const size_t n = static_cast<size_t>(grid_points);
    std::vector<double> xs(n + 1), ys(n + 1);
    const double dx = (x_hi - x_lo) / static_cast<double>(n);
    size_t peak_index = 0;
    for (size_t i = 0; i <= n; ++i) {
        xs[i] = x_lo + dx * static_cast<double>(i);
        ys[i] = curve(xs[i]);
        if (ys[i] > ys[peak_index]) peak_index = i;
    }
    const double a = xs[peak_index == 0 ? 0 : peak_index - 1];
    const double b = xs[std::min(n, peak_index + 1)];
    const Extremum peak = golden_extremum(curve, a, b, true);
    return fwhm_from_samples(xs, ys, peak.x, std::max(peak.value, ys[peak_index]),
                             peak_index);
}

FwhmResult fwhm_sampled(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw config_error("fwhm_sampled: need >= 3 matching samples");
    }
    size_t peak_index = 0;
    for (size_t i = 1; i < y.size(); ++i) {
        if (y[i] > y[peak_index]) peak_index = i;
    }
    return fwhm_from_samples(x, y, x[peak_index], y[peak_index], peak_index);
}

double compression_factor(const Curve& curve_a, const Curve& curve_b, double x_lo,
                          double x_hi) {
    return fwhm(curve_b, x_lo, x_hi).fwhm / fwhm(curve_a, x_lo, x_hi).fwhm;
}

ContrastReport contrast(const Curve& curve, double separation_m,
                        double search_halfwidth_m, double rayleigh_m) {
    if (!(separation_m > 0.0)) {
        throw config_error("contrast: requires a two-beam scenario (separation > 0)");
    }
    if (!(search_halfwidth_m > 0.5 * separation_m)) {
        throw config_error("contrast: search halfwidth must cover the beam centers");
    }

    const int n = 4096;  // even: index n/2 sits exactly on the midpoint
    std::vector<double> xs(n + 1), ys(n + 1);
    const double dx = 2.0 * search_halfwidth_m / n;
    int peak_i = 0;
    for (int i = 0; i <= n; ++i) {
        xs[i] = -search_halfwidth_m + dx * i;
        ys[i] = curve(xs[i]);
        if (ys[i] > ys[peak_i]) peak_i = i;
    }

    const Extremum peak = golden_extremum(curve, xs[std::max(0, peak_i - 1)],
                                          xs[std::min(n, peak_i + 1)], true);

    ContrastReport report;
    report.separation_m = separation_m;
    report.separation_rayleigh = rayleigh_m > 0.0 ? separation_m / rayleigh_m : 0.0;
    report.i_max = std::max(peak.value, ys[peak_i]);
    report.peak_x = peak.x;

    // Saddle: the deepest interior local minimum on the open interval
    // between the beam centers (-s/2, s/2). Below the Sparrow limit no such
    // minimum exists and the dip is gone.
    const double s_half = 0.5 * separation_m;
    int sad_i = -1;
    for (int i = 1; i < n; ++i) {
        if (xs[i] <= -s_half || xs[i] >= s_half) continue;
        if (ys[i] < ys[i - 1] && ys[i] <= ys[i + 1]) {
            if (sad_i < 0 || ys[i] < ys[sad_i]) sad_i = i;
        }
    }

    if (sad_i < 0) {
        report.no_dip = true;
        report.i_saddle = report.i_max;
        report.saddle_x = report.peak_x;
        report.contrast = 0.0;
        return report;
    }

    const Extremum saddle =
        golden_extremum(curve, xs[sad_i - 1], xs[sad_i + 1], false);
    report.i_saddle = std::min(saddle.value, ys[sad_i]);
    report.saddle_x = saddle.x;

    if (report.i_saddle >= report.i_max * (1.0 - 1e-12)) {
        report.no_dip = true;
        report.i_saddle = report.i_max;
        report.saddle_x = report.peak_x;
        report.contrast = 0.0;
        return report;
    }
    report.contrast = (report.i_max - report.i_saddle) / (report.i_max + report.i_saddle);
    return report;
}

ContrastReport contrast_from_samples(std::span<const double> x, std::span<const double> y,
                                     const ContrastReport& analytic) {
    if (x.size() != y.size() || x.empty()) {
        throw config_error("contrast_from_samples: need matching non-empty samples");
    }
    auto nearest = [&](double target) {
        size_t best = 0;
        for (size_t i = 1; i < x.size(); ++i) {
            if (std::abs(x[i] - target) < std::abs(x[best] - target)) best = i;
        }
        return best;
    };
    ContrastReport report = analytic;
    if (analytic.no_dip) {
        report.contrast = 0.0;
        return report;
    }
    const size_t ip = nearest(analytic.peak_x);
    const size_t is = nearest(analytic.saddle_x);
    report.peak_x = x[ip];
    report.saddle_x = x[is];
    report.i_max = y[ip];
    report.i_saddle = y[is];
    const double denom = report.i_max + report.i_saddle;
    report.contrast = denom > 0.0 ? (report.i_max - report.i_saddle) / denom : 0.0;
    return report;
}

std::vector<ContrastSweepRow> contrast_sweep(const SourceStatistics& src,
                                             const PinholeGeometry& g, double beam_mean,
                                             std::span<const int> k_list,
                                             std::span<const double> s_rayleigh_list) {
    if (!std::isfinite(beam_mean) || beam_mean <= 0.0) {
        throw config_error("contrast_sweep: beam mean must be > 0");
    }
    const double rayleigh = rayleigh_separation(g);
    const IrradianceProfile base = IrradianceProfile::airy_disk(g);

    std::vector<ContrastSweepRow> rows;
    rows.reserve(s_rayleigh_list.size());
    for (const double s_r : s_rayleigh_list) {
        if (!(s_r > 0.0)) {
            throw config_error("contrast_sweep: separations must be > 0 Rayleigh units");
        }
        const double s = s_r * rayleigh;
        const double halfwidth = 0.5 * s + 1.5 * rayleigh;
        const IrradianceProfile tb = IrradianceProfile::two_beam(
            base.with_domain(-halfwidth, halfwidth), s, 1.0);

        // Detected means follow mu(x) = mu_beam * [base(x-s/2) + base(x+s/2)];
        // the equivalent normalized form uses the peak mean mu_beam * N.
        const double peak_mean = beam_mean * tb.peak_normalization();
        const PhotonNumberDistribution table = src.scaled_to_mean(peak_mean).truncate();

        ContrastSweepRow row;
        row.s_rayleigh = s_r;
        row.s_m = s;

        const Curve classical = [&tb](double x) { return tb.unnormalized_sum(x); };
        const ContrastReport c_cl = contrast(classical, s, halfwidth, rayleigh);
        row.c_classical = c_cl.contrast;
        row.no_dip = c_cl.no_dip;

        const Curve spd = [&tb, &table](double x) {
            return 1.0 - kernels::beamsplitter_point(table.p, 0, tb.value(x));
        };
        row.c_spd = contrast(spd, s, halfwidth, rayleigh).contrast;

        row.c_k.reserve(k_list.size());
        for (const int k : k_list) {
            const Curve per_k = [&tb, &table, k](double x) {
                return kernels::beamsplitter_point(table.p, k, tb.value(x));
            };
            row.c_k.push_back(contrast(per_k, s, halfwidth, rayleigh).contrast);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double sparrow_separation(const IrradianceProfile& base, double s_lo_m, double s_hi_m) {
    if (base.kind() == ProfileKind::two_beam || base.kind() == ProfileKind::tabulated) {
        throw config_error("sparrow_separation: base must be a single-beam profile");
    }
    if (!(s_hi_m > s_lo_m) || !(s_lo_m > 0.0)) {
        throw config_error("sparrow_separation: invalid bracket");
    }

    const double h = 1e-4 * base.feature_scale();
    auto curvature = [&](double s) {
        auto summed = [&](double x) {
            return base.value(x - 0.5 * s) + base.value(x + 0.5 * s);
        };
        return (-summed(2.0 * h) + 16.0 * summed(h) - 30.0 * summed(0.0) +
                16.0 * summed(-h) - summed(-2.0 * h)) /
               (12.0 * h * h);
    };

    double lo = s_lo_m, hi = s_hi_m;
    double f_lo = curvature(lo);
    double f_hi = curvature(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw numeric_error("sparrow_separation: curvature does not change sign in bracket");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = curvature(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SparrowResult sparrow_limit(const PinholeGeometry& g) {
    const double rayleigh = rayleigh_separation(g);
    const IrradianceProfile base = IrradianceProfile::airy_disk(g);
    SparrowResult result;
    result.separation_m = sparrow_separation(base, 0.3 * rayleigh, 1.2 * rayleigh);
    result.separation_rayleigh = result.separation_m / rayleigh;
    return result;
}

FitResult fit_slit_profile(std::span<const double> x, std::span<const double> y,
                           const FitOptions& options, std::array<double, 3> initial) {
    auto model = [&options](std::span<const double> p, double xi) {
        const double t2 = kernels::sinc2((xi - p[2]) * p[1]);
        return detected_value(p[0] * t2, options);
    };
    const double inf = std::numeric_limits<double>::infinity();
    const Bound bounds[3] = {{1e-12, inf}, {1e-12, inf}, {-inf, inf}};
    const double step[3] = {0.1 * initial[0], 0.1 * initial[1],
                            0.05 / std::max(initial[1], 1e-12)};
    return run_fit(model, x, y, bounds, {"mu", "scale_per_m", "center_m"}, initial, step,
                   options);
}

FitResult fit_two_beam_profile(std::span<const double> x, std::span<const double> y,
                               const PinholeGeometry& g, const FitOptions& options,
                               std::array<double, 5> initial) {
    g.validate();
    auto model = [&options, &g](std::span<const double> p, double xi) {
        const double t = xi - p[3];
        const double left = airy(std::abs(t - 0.5 * p[1]), g);
        const double right = airy(std::abs((t + 0.5 * p[1]) / p[4]), g);
        return detected_value(p[0] * (left + p[2] * right), options);
    };
    const double inf = std::numeric_limits<double>::infinity();
    const Bound bounds[5] = {
        {1e-12, inf}, {0.0, inf}, {1e-9, 1.0}, {-inf, inf}, {1e-3, 1e3}};
    const double rayleigh = rayleigh_separation(g);
    const double step[5] = {0.1 * initial[0], 0.05 * rayleigh, 0.05, 0.05 * rayleigh,
                            0.05};
    return run_fit(model, x, y, bounds,
                   {"mu_beam", "separation_m", "imbalance", "center_m", "width_scale"},
                   initial, step, options);
}

}  // namespace pnr
