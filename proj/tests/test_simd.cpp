#include "tcsim/dynamics.hpp"
#include "tcsim/simd/kernels.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace tcsim;
using simd::KernelTable;

namespace {

std::vector<double> random_doubles(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) {
        x = u(rng);
    }
    return v;
}

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<cplx> v(n);
    for (cplx& x : v) {
        x = {u(rng), u(rng)};
    }
    return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
    }
    return worst;
}

void check_against_scalar(const KernelTable& k) {
    const KernelTable& ref = simd::scalar_kernels();
    std::mt19937_64 rng(2024);
    // sizes straddle every vector width and remainder
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 101, 1000}) {
        CAPTURE(n);
        {
            const auto x = random_complex(n, rng);
            auto y1 = random_complex(n, rng);
            auto y2 = y1;
            const cplx a(0.3, -1.7);
            ref.caxpy(n, a, x.data(), y1.data());
            k.caxpy(n, a, x.data(), y2.data());
            CHECK(testing::max_abs_difference(y1, y2) < 1e-14);
        }
        {
            const auto w = random_doubles(n, rng);
            const auto x = random_complex(n, rng);
            auto y1 = random_complex(n, rng);
            auto y2 = y1;
            ref.weighted_accumulate(n, w.data(), x.data(), y1.data());
            k.weighted_accumulate(n, w.data(), x.data(), y2.data());
            CHECK(testing::max_abs_difference(y1, y2) < 1e-14);
        }
        {
            const auto base = random_doubles(n, rng);
            std::vector<std::vector<double>> terms;
            std::vector<const double*> ptrs;
            for (int s = 0; s < 7; ++s) {
                terms.push_back(random_doubles(n, rng));
            }
            for (const auto& t : terms) {
                ptrs.push_back(t.data());
            }
            const std::vector<double> coeff{0.1, -0.2, 0.3, 0.0, 1e-3, 2.5, -0.7};
            for (std::size_t nt : {std::size_t(0), std::size_t(1), std::size_t(6), std::size_t(7)}) {
                std::vector<double> o1(n), o2(n);
                ref.linear_combination(n, base.data(), nt, coeff.data(), ptrs.data(), o1.data());
                k.linear_combination(n, base.data(), nt, coeff.data(), ptrs.data(), o2.data());
                CHECK(max_rel(o1, o2) < 1e-14);
            }
        }
        {
            const auto err = random_doubles(n, rng);
            const auto a = random_doubles(n, rng);
            const auto b = random_doubles(n, rng);
            const double r1 = ref.max_error_ratio(n, err.data(), a.data(), b.data(), 1e-10, 1e-8);
            const double r2 = k.max_error_ratio(n, err.data(), a.data(), b.data(), 1e-10, 1e-8);
            CHECK(r1 == doctest::Approx(r2).epsilon(1e-14));
            if (n == 0) {
                CHECK(r1 == 0.0);
            }
        }
    }
}

void check_nan_propagation(const KernelTable& k) {
    for (std::size_t n : {1, 5, 9, 17}) {
        for (std::size_t pos = 0; pos < n; ++pos) {
            std::vector<double> err(n, 1e-12), a(n, 1.0), b(n, 1.0);
            err[pos] = std::numeric_limits<double>::quiet_NaN();
            CHECK(std::isnan(k.max_error_ratio(n, err.data(), a.data(), b.data(), 1e-10, 1e-8)));
        }
    }
}

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
    const KernelTable& k = simd::scalar_kernels();
    CHECK(k.backend == simd::Backend::scalar);
    std::vector<cplx> x{{1, 2}, {3, -1}}, y{{0, 0}, {1, 1}};
    k.caxpy(2, {0, 1}, x.data(), y.data());
    CHECK(y[0] == cplx(-2, 1));
    CHECK(y[1] == cplx(2, 4));

    std::vector<double> w{2.0, -1.0};
    k.weighted_accumulate(2, w.data(), x.data(), y.data());
    CHECK(y[0] == cplx(0, 5));
    CHECK(y[1] == cplx(-1, 5));

    const std::vector<double> err{1e-9, -4e-9}, a{1.0, 0.0}, b{0.0, 2.0};
    // 4e-9 / (1e-10 + 1e-8 * 2)
    CHECK(k.max_error_ratio(2, err.data(), a.data(), b.data(), 1e-10, 1e-8) ==
          doctest::Approx(4e-9 / (1e-10 + 2e-8)));
    check_nan_propagation(k);
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const KernelTable* k = simd::avx2_kernels();
    if (k == nullptr) {
        MESSAGE("AVX2+FMA unavailable; skipping");
        return;
    }
    CHECK(k->backend == simd::Backend::avx2);
    check_against_scalar(*k);
    check_nan_propagation(*k);
}

TEST_CASE("kernel selection") {
    CHECK(&simd::kernels_for(simd::Backend::scalar) == &simd::scalar_kernels());
    if (simd::avx2_kernels() != nullptr) {
        CHECK(&simd::kernels_for(simd::Backend::avx2) == simd::avx2_kernels());
    } else {
        CHECK_THROWS(simd::kernels_for(simd::Backend::avx2));
    }
    const KernelTable& best = simd::best_kernels();
    CHECK((best.backend == simd::Backend::scalar || best.backend == simd::Backend::avx2));
}

TEST_CASE("evolution is backend independent") {
    const KernelTable* fast = simd::avx2_kernels();
    if (fast == nullptr) {
        MESSAGE("AVX2+FMA unavailable; skipping");
        return;
    }
    SystemParams p = SystemParams::homogeneous(5, 5.0);
    p.gamma = 0.05 * p.g;
    p.gamma_phi = 0.02 * p.g;
    const BlockDensityMatrix rho0 = to_density(dicke_state(5, 2));

    const LiouvillianCache scalar_cache(p, 2, simd::scalar_kernels());
    const LiouvillianCache fast_cache(p, 2, *fast);
    const BlockDensityMatrix r = testing::random_hermitian(5, 2, 11);
    const BlockDensityMatrix d1 = apply_liouvillian(scalar_cache, r);
    const BlockDensityMatrix d2 = apply_liouvillian(fast_cache, r);
    CHECK(testing::max_abs_difference(d1.data(), d2.data()) < 1e-15);

    IntegratorConfig cfg;
    cfg.tau_max = 4.0;
    const ObservableSeries a = evolve(scalar_cache, rho0, cfg);
    const ObservableSeries b = evolve(fast_cache, rho0, cfg);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max({worst, std::abs(a.tau[i] - b.tau[i]), std::abs(a.n_ph[i] - b.n_ph[i]),
                          std::abs(a.n_q[i] - b.n_q[i]), std::abs(a.rate_n_q[i] - b.rate_n_q[i])});
    }
    CHECK(worst < 1e-10);
}
