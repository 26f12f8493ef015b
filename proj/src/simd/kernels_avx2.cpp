// Compiled with -mavx2 -mfma. Only reached after a runtime CPUID check.

#include "tcsim/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcsim::simd {
namespace {

void caxpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d xs = _mm256_permute_pd(xv, 0b0101);  // (im, re) pairs
        const __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = cplx(y[i].real() + (a.real() * xr - a.imag() * xi),
                    y[i].imag() + (a.real() * xi + a.imag() * xr));
    }
}

void weighted_accumulate_avx2(std::size_t n, const double* w, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d wv =
            _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0b01010000);
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_fmadd_pd(wv, xv, _mm256_loadu_pd(yd + 2 * i)));
    }
    for (; i < n; ++i) {
        y[i] = cplx(y[i].real() + w[i] * x[i].real(), y[i].imag() + w[i] * x[i].imag());
    }
}

void linear_combination_avx2(std::size_t n, const double* base, std::size_t n_terms,
                             const double* coeff, const double* const* terms, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t s = 0; s < n_terms; ++s) {
            acc = _mm256_fmadd_pd(_mm256_set1_pd(coeff[s]), _mm256_loadu_pd(terms[s] + i), acc);
        }
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(base + i), acc));
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n_terms; ++s) {
            acc += coeff[s] * terms[s][i];
        }
        out[i] = base[i] + acc;
    }
}

double max_error_ratio_avx2(std::size_t n, const double* err, const double* a, const double* b,
                            double abs_tol, double rel_tol) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d atol = _mm256_set1_pd(abs_tol);
    const __m256d rtol = _mm256_set1_pd(rel_tol);
    __m256d worst = _mm256_setzero_pd();
    __m256d nan_seen = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ea = _mm256_andnot_pd(sign, _mm256_loadu_pd(err + i));
        const __m256d aa = _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i));
        const __m256d ba = _mm256_andnot_pd(sign, _mm256_loadu_pd(b + i));
        const __m256d scale = _mm256_fmadd_pd(rtol, _mm256_max_pd(aa, ba), atol);
        const __m256d ratio = _mm256_div_pd(ea, scale);
        nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(ratio, ratio, _CMP_UNORD_Q));
        worst = _mm256_max_pd(worst, ratio);
    }
    if (_mm256_movemask_pd(nan_seen) != 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, worst);
    double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double r = std::abs(err[i]) / scale;
        if (std::isnan(r)) {
            return r;
        }
        result = std::max(result, r);
    }
    return result;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{
        Backend::avx2,           "avx2",
        &caxpy_avx2,             &weighted_accumulate_avx2,
        &linear_combination_avx2, &max_error_ratio_avx2,
    };
    return table;
}

}  // namespace tcsim::simd
