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

#include "pnr/photon_stats.hpp"

#include <cmath>
#include <stdexcept>

#include "pnr/errors.hpp"
#include "pnr/kernels.hpp"

namespace pnr {
namespace {

constexpr size_t kMaxTruncationTerms = 1u << 20;

double pow_int(double base, int k) {
    double result = 1.0;
    double b = base;
    int n = k;
    while (n > 0) {
        if (n & 1) result *= b;
        b *= b;
        n >>= 1;
    }
    return result;
}

double checked_t2(double t2) {
    if (!(t2 >= -1e-12 && t2 <= 1.0 + 1e-12)) {
        throw std::domain_error("beamsplitter_transform: transmission outside [0, 1]");
    }
    return std::min(1.0, std::max(0.0, t2));
}

}  // namespace

SourceStatistics SourceStatistics::coherent(double mean_photons) {
    if (!std::isfinite(mean_photons) || mean_photons <= 0.0) {
        throw config_error("coherent source mean must be finite and > 0");
    }
    return {SourceFamily::coherent, mean_photons, 0};
}

SourceStatistics SourceStatistics::thermal(double mean_photons) {
    if (!std::isfinite(mean_photons) || mean_photons <= 0.0) {
        throw config_error("thermal source mean must be finite and > 0");
    }
    return {SourceFamily::thermal, mean_photons, 0};
}

SourceStatistics SourceStatistics::fock(int photon_number) {
    if (photon_number < 0) {
        throw config_error("fock photon number must be >= 0");
    }
    return {SourceFamily::fock, static_cast<double>(photon_number), photon_number};
}

double SourceStatistics::pmf(int k) const {
    if (k < 0) throw std::domain_error("source pmf: photon number must be >= 0");
    switch (family_) {
        case SourceFamily::coherent:
            return poisson_pmf(mean_, k);
        case SourceFamily::thermal:
            return thermal_pmf(mean_, k);
        case SourceFamily::fock:
            return k == fock_n_ ? 1.0 : 0.0;
    }
    throw numeric_error("source pmf: unknown family");
}

PhotonNumberDistribution SourceStatistics::truncate(double tail_bound) const {
    PhotonNumberDistribution dist;
    if (family_ == SourceFamily::fock) {
        dist.p.assign(fock_n_ + 1, 0.0);
        dist.p[fock_n_] = 1.0;
        dist.tail_mass = 0.0;
        return dist;
    }
    // Stable forward recurrences; extended until the remaining mass is small.
    double p;
    double ratio_const = 0.0;
    if (family_ == SourceFamily::coherent) {
        p = std::exp(-mean_);
    } else {
        p = 1.0 / (1.0 + mean_);
        ratio_const = mean_ / (1.0 + mean_);
    }
    double cum = 0.0;
    for (size_t j = 0; j < kMaxTruncationTerms; ++j) {
        dist.p.push_back(p);
        cum += p;
        if (1.0 - cum < tail_bound) break;
        p *= (family_ == SourceFamily::coherent) ? mean_ / static_cast<double>(j + 1)
                                                 : ratio_const;
    }
    dist.tail_mass = std::max(0.0, 1.0 - cum);
    if (dist.tail_mass >= tail_bound && dist.p.size() >= kMaxTruncationTerms) {
        throw numeric_error("truncate: source distribution too heavy-tailed");
    }
    return dist;
}

SourceStatistics SourceStatistics::scaled_to_mean(double mean_photons) const {
    switch (family_) {
        case SourceFamily::coherent:
            return coherent(mean_photons);
        case SourceFamily::thermal:
            return thermal(mean_photons);
        case SourceFamily::fock:
            if (std::abs(mean_photons - fock_n_) > 1e-9 * std::max(1.0, mean_)) {
                throw config_error(
                    "fock source cannot be rescaled: peak mean must equal the photon number");
            }
            return *this;
    }
    throw numeric_error("scaled_to_mean: unknown family");
}

const char* SourceStatistics::family_name() const {
    switch (family_) {
        case SourceFamily::coherent:
            return "coherent";
        case SourceFamily::thermal:
            return "thermal";
        case SourceFamily::fock:
            return "fock";
    }
    return "unknown";
}

void DetectionModel::validate() const {
    if (mode == DetectionMode::number_resolving && k_max < 1) {
        throw config_error("detection.k_max must be >= 1 for number-resolving mode");
    }
}

double beamsplitter_transform(const PhotonNumberDistribution& src, double t2, int k) {
    if (k < 0) throw std::domain_error("beamsplitter_transform: k must be >= 0");
    return kernels::beamsplitter_point(src.p, k, checked_t2(t2));
}

double beamsplitter_transform(const SourceStatistics& src, double t2, int k) {
    return beamsplitter_transform(src.truncate(), t2, k);
}

std::vector<double> conditional_profile(const SourceStatistics& src,
                                        const IrradianceProfile& profile, int k,
                                        std::span<const double> x, double peak_mean) {
    if (k < 0) throw std::domain_error("conditional_profile: k must be >= 0");
    if (!std::isfinite(peak_mean) || peak_mean <= 0.0) {
        throw std::domain_error("conditional_profile: peak mean must be > 0");
    }
    const PhotonNumberDistribution table = src.scaled_to_mean(peak_mean).truncate();
    const std::vector<double> t2 = profile.evaluate(x);
    std::vector<double> out(x.size());
    kernels::beamsplitter_grid(table.p, k, t2, out);
    return out;
}

std::vector<double> classical_mean_profile(const IrradianceProfile& profile,
                                           double peak_mean, std::span<const double> x) {
    if (!std::isfinite(peak_mean) || peak_mean <= 0.0) {
        throw std::domain_error("classical_mean_profile: peak mean must be > 0");
    }
    std::vector<double> out = profile.evaluate(x);
    for (double& v : out) v *= peak_mean;
    return out;
}

std::vector<double> spd_click_profile(const SourceStatistics& src,
                                      const IrradianceProfile& profile, double peak_mean,
                                      std::span<const double> x) {
    std::vector<double> out = conditional_profile(src, profile, 0, x, peak_mean);
    for (double& v : out) v = 1.0 - v;
    return out;
}

double poisson_pmf(double mean, int k) {
    if (k < 0) return 0.0;
    if (!(mean >= 0.0)) throw std::domain_error("poisson_pmf: mean must be >= 0");
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

double thermal_pmf(double mean, int k) {
    if (k < 0) return 0.0;
    if (!(mean >= 0.0)) throw std::domain_error("thermal_pmf: mean must be >= 0");
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(mean) - (k + 1.0) * std::log1p(mean));
}

double binomial_pmf(int n, double p, int k) {
    if (n < 0) throw std::domain_error("binomial_pmf: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p outside [0, 1]");
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    if (n <= 30) {
        // C(n,k) is exact in double up to n = 30.
        double c = 1.0;
        for (int i = 1; i <= k; ++i) {
            c *= static_cast<double>(n - k + i) / static_cast<double>(i);
        }
        return c * pow_int(p, k) * pow_int(1.0 - p, n - k);
    }
    // Log-space above n = 30 to avoid overflowing the binomial coefficient.
    const double logc =
        std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(logc + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace pnr
