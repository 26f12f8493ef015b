#pragma once

// Inner-loop kernels used by the Liouvillian and the Runge-Kutta integrator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant compiled in its own translation unit. The variant is
// picked once at runtime from CPUID; TCSIM_SIMD=scalar|avx2 overrides it.
// Both variants are held to the scalar results by the equivalence tests.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace tcsim::simd {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

struct KernelTable {
    Backend backend;
    std::string_view name;

    /// y[i] += a * x[i]
    void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);

    /// y[i] += w[i] * x[i]  (real weights, complex data)
    void (*weighted_accumulate)(std::size_t n, const double* w, const cplx* x, cplx* y);

    /// out[i] = base[i] + sum_s coeff[s] * terms[s][i]   (n doubles)
    void (*linear_combination)(std::size_t n, const double* base, std::size_t n_terms,
                               const double* coeff, const double* const* terms, double* out);

    /// max_i |err[i]| / (abs_tol + rel_tol * max(|a[i]|, |b[i]|))   (n doubles)
    double (*max_error_ratio)(std::size_t n, const double* err, const double* a,
                              const double* b, double abs_tol, double rel_tol);
};

const KernelTable& scalar_kernels();

/// Null when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Best table for this machine, honoring TCSIM_SIMD. Resolved once.
const KernelTable& best_kernels();

const KernelTable& kernels_for(Backend backend);

bool cpu_has_avx2();

// span helpers over complex storage viewed as interleaved doubles
inline const double* as_doubles(std::span<const cplx> v) {
    return reinterpret_cast<const double*>(v.data());
}
inline double* as_doubles(std::span<cplx> v) { return reinterpret_cast<double*>(v.data()); }

}  // namespace tcsim::simd
