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

#include "pnr/profiles.hpp"

namespace pnr {

enum class SourceFamily { coherent, thermal, fock };

/// Adaptively truncated photon-number distribution: probabilities for
/// k = 0..k_cap plus the remaining tail mass, with sum(p) + tail = 1.
struct PhotonNumberDistribution {
    std::vector<double> p;
    double tail_mass = 0.0;

    int k_cap() const { return static_cast<int>(p.size()) - 1; }
};

inline constexpr double kSourceTailBound = 1e-14;

/// Photon-number statistics of the illumination: coherent (Poissonian),
/// thermal (Bose-Einstein) or Fock (fixed photon number).
class SourceStatistics {
public:
    static SourceStatistics coherent(double mean_photons);
    static SourceStatistics thermal(double mean_photons);
    static SourceStatistics fock(int photon_number);

    SourceFamily family() const { return family_; }
    double mean() const { return mean_; }
    int fock_n() const { return fock_n_; }

    /// Probability of emitting exactly k photons. k < 0 is a domain error.
    double pmf(int k) const;

    /// Table of pmf values extended until the remaining source mass drops
    /// below tail_bound.
    PhotonNumberDistribution truncate(double tail_bound = kSourceTailBound) const;

    /// Same family with the detected mean rescaled. Fock states cannot be
    /// rescaled: the requested mean must equal N.
    SourceStatistics scaled_to_mean(double mean_photons) const;

    const char* family_name() const;

private:
    SourceStatistics(SourceFamily family, double mean, int n)
        : family_(family), mean_(mean), fock_n_(n) {}

    SourceFamily family_;
    double mean_;
    int fock_n_;
};

enum class DetectionMode { number_resolving, single_photon, classical_mean };

struct DetectionModel {
    DetectionMode mode = DetectionMode::number_resolving;
    int k_max = 9;

    void validate() const;  // k_max >= 1 for number-resolving detection
};

/// Probability of detecting k photons behind a beamsplitter of transmission
/// t2 acting on the source: direct summation
///   p(k) = sum_{j>=k} pmf(j) C(j,k) t2^k (1-t2)^(j-k)
/// with the source adaptively truncated (tail < 1e-14). The closed forms
/// (Poisson, thermal, binomial at the transmitted mean) are used as oracles
/// in the tests, never as shortcuts here.
double beamsplitter_transform(const SourceStatistics& src, double t2, int k);
double beamsplitter_transform(const PhotonNumberDistribution& src, double t2, int k);

/// p_k(x): detection probability of exactly k photons at each grid position,
/// with the source rescaled so the detected mean at the profile peak is
/// peak_mean and T^2(x) taken from the profile.
std::vector<double> conditional_profile(const SourceStatistics& src,
                                        const IrradianceProfile& profile, int k,
                                        std::span<const double> x, double peak_mean);

/// peak_mean * T^2(x): the expectation of the per-pulse detected photon
/// number, target of the classical reconstruction.
std::vector<double> classical_mean_profile(const IrradianceProfile& profile,
                                           double peak_mean, std::span<const double> x);

/// 1 - p_0(x): click probability of a conventional (non-number-resolving)
/// single-photon detector.
std::vector<double> spd_click_profile(const SourceStatistics& src,
                                      const IrradianceProfile& profile, double peak_mean,
                                      std::span<const double> x);

// Closed-form distributions (fit models, samplers, analytic cross-checks).
double poisson_pmf(double mean, int k);
double thermal_pmf(double mean, int k);
double binomial_pmf(int n, double p, int k);

}  // namespace pnr
