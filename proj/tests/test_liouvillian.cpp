#include "tcsim/dynamics.hpp"
#include "tcsim/liouvillian.hpp"
#include "tcsim/observables.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace tcsim;

namespace {

SystemParams lossy(int nq, bool lab_frame = false) {
    SystemParams p = SystemParams::homogeneous(nq, 3.0);
    for (int j = 0; j < nq; ++j) {
        p.epsilons[std::size_t(j)] = 1.0 + 0.004 * (j - 1);
    }
    p.gamma = 0.3 * p.g;
    p.gamma_phi = 0.2 * p.g;
    p.lab_frame = lab_frame;
    return p;
}

double total_trace(const BlockDensityMatrix& m) {
    double t = 0.0;
    for (int n = 0; n <= m.max_sector(); ++n) {
        t += m.block(n).trace().real();
    }
    return t;
}

}  // namespace

TEST_CASE("vacuum is stationary") {
    for (int nq = 1; nq <= 5; ++nq) {
        const LiouvillianCache cache(lossy(nq), 2);
        const BlockDensityMatrix d = apply_liouvillian(cache, BlockDensityMatrix::vacuum(nq, 2));
        for (const cplx& v : d.data()) {
            CHECK(v == cplx(0.0));
        }
    }
}

TEST_CASE("bare amplitude damping") {
    SystemParams p = SystemParams::homogeneous(1, 0.0);
    p.g = 0.0;
    p.kappa = 0.0;
    p.gamma = 0.37;
    const LiouvillianCache cache(p, 1);
    const BlockDensityMatrix rho = to_density(product_state(1, 1));
    const BlockDensityMatrix d = apply_liouvillian(cache, rho);
    const Populations dn = expectations(d);
    CHECK(dn.n_q == doctest::Approx(-0.37 * expectations(rho).n_q).epsilon(1e-15));
    CHECK(dn.n_ph == 0.0);
}

TEST_CASE("fused generator matches the reference assembly") {
    for (int nq = 1; nq <= 6; ++nq) {
        for (int nex = 1; nex <= std::min(nq, 3); ++nex) {
            for (bool lab : {false, true}) {
                CAPTURE(nq);
                CAPTURE(nex);
                CAPTURE(lab);
                const LiouvillianCache cache(lossy(nq, lab), nex);
                const BlockDensityMatrix rho = testing::random_hermitian(nq, nex, std::uint32_t(17 * nq + nex));
                const BlockDensityMatrix fast = apply_liouvillian(cache, rho);
                const BlockDensityMatrix ref = apply_liouvillian_reference(cache, rho);
                double scale = 0.0;
                for (const cplx& v : ref.data()) {
                    scale = std::max(scale, std::abs(v));
                }
                CHECK(testing::max_abs_difference(fast.data(), ref.data()) <= 1e-13 * scale);
            }
        }
    }
}

TEST_CASE("block generator equals the full-space generator") {
    for (int nq = 1; nq <= 3; ++nq) {
        for (int nex = 1; nex <= std::min(nq, 2); ++nex) {
            const SystemParams p = lossy(nq, true);
            const LiouvillianCache cache(p, nex);
            const DenseModel model(p, nex + 2);
            const BlockDensityMatrix rho = testing::random_hermitian(nq, nex, 5u + std::uint32_t(nq));
            const Eigen::MatrixXcd block = model.embed(apply_liouvillian(cache, rho));
            const Eigen::MatrixXcd dense = model.apply_liouvillian(model.embed(rho));
            CHECK((block - dense).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("generator output is Hermitian and traceless") {
    for (int nq = 2; nq <= 7; ++nq) {
        const int nex = (nq + 1) / 2;
        const LiouvillianCache cache(lossy(nq), nex);
        const BlockDensityMatrix d = apply_liouvillian(cache, testing::random_hermitian(nq, nex, 99));
        CHECK(d.hermiticity_error() < 1e-15);
        CHECK(std::abs(total_trace(d)) < 1e-12);
    }
}

TEST_CASE("rebuilding the cache is bit-identical") {
    const BlockDensityMatrix rho = testing::random_hermitian(4, 2, 3);
    const LiouvillianCache a(lossy(4), 2);
    const LiouvillianCache b(lossy(4), 2);
    const BlockDensityMatrix da = apply_liouvillian(a, rho);
    const BlockDensityMatrix db = apply_liouvillian(b, rho);
    CHECK(testing::max_abs_difference(da.data(), db.data()) == 0.0);
}

TEST_CASE("shape mismatches are structural errors") {
    const LiouvillianCache cache(lossy(3), 2);
    CHECK_THROWS_AS(apply_liouvillian(cache, BlockDensityMatrix(3, 1)), StructuralError);
    CHECK_THROWS_AS(apply_liouvillian(cache, BlockDensityMatrix(4, 2)), StructuralError);
    CHECK_THROWS_AS(apply_liouvillian_reference(cache, BlockDensityMatrix(3, 3)), StructuralError);
    std::vector<cplx> out(cache.state_size());
    std::vector<cplx> short_state(cache.state_size() - 1);
    LiouvillianWorkspace work(cache);
    CHECK_THROWS_AS(apply_liouvillian(cache, short_state, out, work), StructuralError);
}

TEST_CASE("perturbation hook changes only the block cache") {
    const SystemParams p = lossy(2);
    LiouvillianCache cache(p, 1);
    const BlockDensityMatrix rho = to_density(dicke_state(2, 1));
    const BlockDensityMatrix before = apply_liouvillian(cache, rho);
    cache.perturb_hamiltonian(1e-4);
    const BlockDensityMatrix after = apply_liouvillian(cache, rho);
    CHECK(testing::max_abs_difference(before.data(), after.data()) > 1e-6);
    CHECK(cache.hamiltonian(1).hermiticity_error() < 1e-15);
}
