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

// Self-contained, platform-independent random number generation. The standard
// library engines are portable but its distributions are not, and the count
// tables must be bit-reproducible across platforms and thread counts, so the
// samplers are implemented here explicitly.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace pnr::rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    return mix64(state += 0x9E3779B97F4A7C15ull);
}

/// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        for (auto& word : s_) word = splitmix64_next(seed);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0, 1]: 53-bit mantissa, never zero (safe under log()).
    double uniform(void) { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

/// Independent per-position stream: a hash of the master seed and the
/// position coordinate's bit pattern, so a position's stream does not depend
/// on scan order, thread layout, or the other positions in the plan.
inline Xoshiro256pp position_stream(std::uint64_t master_seed, double position_m) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(position_m);
    return Xoshiro256pp(mix64(master_seed ^ mix64(bits + 0x2545F4914F6CDD1Dull)));
}

/// Exact Poisson sampler: Knuth's product method, chunked by additivity for
/// large means so exp(-mean) never underflows. No normal approximation.
class PoissonSampler {
public:
    explicit PoissonSampler(double mean) {
        full_chunks_ = 0;
        double rest = mean;
        while (rest > kChunk) {
            rest -= kChunk;
            ++full_chunks_;
        }
        limit_rest_ = std::exp(-rest);
    }

    int operator()(Xoshiro256pp& gen) const {
        int total = 0;
        for (int c = 0; c < full_chunks_; ++c) total += knuth(gen, kChunkLimit);
        return total + knuth(gen, limit_rest_);
    }

private:
    static constexpr double kChunk = 500.0;
    static inline const double kChunkLimit = std::exp(-kChunk);

    static int knuth(Xoshiro256pp& gen, double limit) {
        int k = 0;
        double p = 1.0;
        for (;;) {
            p *= gen.uniform();
            if (p <= limit) return k;
            ++k;
        }
    }

    int full_chunks_;
    double limit_rest_;
};

/// Exact inverse-transform sampler for the thermal (Bose-Einstein) photon
/// number distribution p(k) = mean^k / (1+mean)^(k+1).
class ThermalSampler {
public:
    explicit ThermalSampler(double mean) {
        inv_log_ratio_ = mean > 0.0 ? 1.0 / std::log(mean / (1.0 + mean)) : 0.0;
    }

    int operator()(Xoshiro256pp& gen) const {
        if (inv_log_ratio_ == 0.0) return 0;
        return static_cast<int>(std::log(gen.uniform()) * inv_log_ratio_);
    }

private:
    double inv_log_ratio_;
};

/// Bernoulli thinning of a Fock state: each of the n photons survives the
/// beamsplitter independently with probability t2.
class BinomialThinning {
public:
    BinomialThinning(int n, double t2) : n_(n), t2_(t2) {}

    int operator()(Xoshiro256pp& gen) const {
        int count = 0;
        for (int i = 0; i < n_; ++i) count += (gen.uniform() <= t2_) ? 1 : 0;
        return count;
    }

private:
    int n_;
    double t2_;
};

}  // namespace pnr::rng
