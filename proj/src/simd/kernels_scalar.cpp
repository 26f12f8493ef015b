#include "tcsim/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tcsim::simd {
namespace {

void caxpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const double ar = a.real();
    const double ai = a.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = cplx(y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ar * xi + ai * xr));
    }
}

void weighted_accumulate_scalar(std::size_t n, const double* w, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = cplx(y[i].real() + w[i] * x[i].real(), y[i].imag() + w[i] * x[i].imag());
    }
}

void linear_combination_scalar(std::size_t n, const double* base, std::size_t n_terms,
                               const double* coeff, const double* const* terms, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n_terms; ++s) {
            acc += coeff[s] * terms[s][i];
        }
        out[i] = base[i] + acc;
    }
}

double max_error_ratio_scalar(std::size_t n, const double* err, const double* a, const double* b,
                              double abs_tol, double rel_tol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double r = std::abs(err[i]) / scale;
        if (std::isnan(r)) {
            return r;
        }
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        Backend::scalar,           "scalar",
        &caxpy_scalar,             &weighted_accumulate_scalar,
        &linear_combination_scalar, &max_error_ratio_scalar,
    };
    return table;
}

}  // namespace tcsim::simd
