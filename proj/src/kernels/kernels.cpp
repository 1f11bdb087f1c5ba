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

#include "pnr/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace pnr::kernels {
namespace {

constexpr double kPi = 3.14159265358979323846;

// t2^k by squaring; the AVX2 lane runs the same multiply sequence per lane so
// both backends produce identical powers.
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

Backend detect_backend() {
#if defined(PNR_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        if (const char* env = std::getenv("PNR_SCOPE_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        }
        return Backend::avx2;
    }
#endif
    return Backend::scalar;
}

}  // namespace

bool backend_available(Backend backend) {
    if (backend == Backend::scalar) return true;
#if defined(PNR_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() {
    static const Backend backend = detect_backend();
    return backend;
}

const char* backend_name(Backend backend) {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

double sinc2(double u) {
    const double au = std::abs(u);
    if (au < 1e-8) {
        const double z = kPi * u;
        const double s = 1.0 - z * z / 6.0;
        return s * s;
    }
    if (au > 1e15) return 0.0;  // sinc^2 < 1e-31 there; spare the reduction
    // sin(pi u) = (-1)^q sin(pi r) with r = u - round(u); the subtraction is
    // exact, so nulls at integer u come out as exact zeros.
    const double q = std::nearbyint(u);
    double r = u - q;
    double s = std::sin(kPi * r);
    if (static_cast<long long>(q) & 1LL) s = -s;
    const double v = s / (kPi * u);
    return v * v;
}

double beamsplitter_point(std::span<const double> source_pmf, int k, double t2) {
    const int j_max = static_cast<int>(source_pmf.size()) - 1;
    if (k > j_max) return 0.0;
    const double om = 1.0 - t2;
    double c = pow_int(t2, k);  // C(j,k) (1-t2)^(j-k) t2^k at j = k
    double acc = source_pmf[k] * c;
    for (int j = k + 1; j <= j_max; ++j) {
        c *= om * (static_cast<double>(j) / static_cast<double>(j - k));
        acc += source_pmf[j] * c;
    }
    return acc;
}

namespace detail {

void gaussian_grid_scalar(std::span<const double> x, double waist, std::span<double> out) {
    const double a = -2.0 / (waist * waist);
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(a * x[i] * x[i]);
    }
}

void slit_sinc2_grid_scalar(std::span<const double> x, double u_per_m,
                            std::span<double> out) {
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = sinc2(x[i] * u_per_m);
    }
}

void beamsplitter_grid_scalar(std::span<const double> source_pmf, int k,
                              std::span<const double> t2, std::span<double> out) {
    for (size_t i = 0; i < t2.size(); ++i) {
        out[i] = beamsplitter_point(source_pmf, k, t2[i]);
    }
}

}  // namespace detail

void gaussian_grid(std::span<const double> x, double waist, std::span<double> out,
                   Backend backend) {
    assert(x.size() == out.size());
#if defined(PNR_HAVE_AVX2)
    if (backend == Backend::avx2) {
        detail::gaussian_grid_avx2(x, waist, out);
        return;
    }
#else
    (void)backend;
#endif
    detail::gaussian_grid_scalar(x, waist, out);
}

void slit_sinc2_grid(std::span<const double> x, double u_per_m, std::span<double> out,
                     Backend backend) {
    assert(x.size() == out.size());
#if defined(PNR_HAVE_AVX2)
    if (backend == Backend::avx2) {
        detail::slit_sinc2_grid_avx2(x, u_per_m, out);
        return;
    }
#else
    (void)backend;
#endif
    detail::slit_sinc2_grid_scalar(x, u_per_m, out);
}

void beamsplitter_grid(std::span<const double> source_pmf, int k,
                       std::span<const double> t2, std::span<double> out,
                       Backend backend) {
    assert(t2.size() == out.size());
    assert(k >= 0);
#if defined(PNR_HAVE_AVX2)
    if (backend == Backend::avx2) {
        detail::beamsplitter_grid_avx2(source_pmf, k, t2, out);
        return;
    }
#else
    (void)backend;
#endif
    detail::beamsplitter_grid_scalar(source_pmf, k, t2, out);
}

void gaussian_grid(std::span<const double> x, double waist, std::span<double> out) {
    gaussian_grid(x, waist, out, active_backend());
}

void slit_sinc2_grid(std::span<const double> x, double u_per_m, std::span<double> out) {
    slit_sinc2_grid(x, u_per_m, out, active_backend());
}

void beamsplitter_grid(std::span<const double> source_pmf, int k,
                       std::span<const double> t2, std::span<double> out) {
    beamsplitter_grid(source_pmf, k, t2, out, active_backend());
}

}  // namespace pnr::kernels
