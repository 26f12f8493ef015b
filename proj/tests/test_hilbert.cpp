#include "tcsim/hilbert.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <set>
#include <utility>

using namespace tcsim;

namespace {

// Full qubits (x) photons space from Kronecker products of single-site
// matrices. Index = mask * (cutoff + 1) + photons, matching bit j <-> qubit j.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

struct KronSpace {
    int nq;
    int cutoff;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd number;  // diag(0..cutoff), not a^dagger a, so entries stay exact
    std::vector<Eigen::MatrixXcd> sm;

    KronSpace(int n_qubits, int photon_cutoff) : nq(n_qubits), cutoff(photon_cutoff) {
        const int nph = cutoff + 1;
        Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(nph, nph);
        for (int n = 1; n < nph; ++n) {
            a1(n - 1, n) = std::sqrt(double(n));
        }
        Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(2, 2);
        lower(0, 1) = 1.0;  // |0><1|, 1 = excited
        const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
        // mask bit nq-1 is the most significant factor
        Eigen::MatrixXcd qid = Eigen::MatrixXcd::Identity(1, 1);
        for (int k = 0; k < nq; ++k) {
            qid = kron(qid, id2);
        }
        a = kron(qid, a1);
        Eigen::VectorXcd counts(nph);
        for (int n = 0; n < nph; ++n) {
            counts(n) = double(n);
        }
        number = kron(qid, Eigen::MatrixXcd(counts.asDiagonal()));
        for (int j = 0; j < nq; ++j) {
            Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
            for (int k = nq - 1; k >= 0; --k) {
                op = kron(op, k == j ? lower : id2);
            }
            sm.push_back(kron(op, Eigen::MatrixXcd::Identity(nph, nph)));
        }
    }

    Eigen::MatrixXcd hamiltonian(const SystemParams& p) const {
        Eigen::MatrixXcd h = p.omega * number;
        for (int j = 0; j < nq; ++j) {
            const auto& s = sm[std::size_t(j)];
            h += p.epsilons[std::size_t(j)] * s.adjoint() * s;
            h += p.g * (a.adjoint() * s + a * s.adjoint());
        }
        return h;
    }

    int index(const BasisState& s) const { return int(s.mask) * (cutoff + 1) + s.photons; }
};

SystemParams disordered(int nq) {
    SystemParams p = SystemParams::homogeneous(nq, 5.0);
    for (int j = 0; j < nq; ++j) {
        p.epsilons[std::size_t(j)] = 1.0 + 0.01 * (j + 1) - 0.013 * j * j;
    }
    p.lab_frame = true;
    return p;
}

cplx element(const SparseBlockOperator& op, std::size_t row, std::size_t col) {
    for (const auto& e : op.entries) {
        if (e.row == row && e.col == col) {
            return e.value;
        }
    }
    return 0.0;
}

}  // namespace

TEST_CASE("sector enumeration") {
    SUBCASE("two qubits, one excitation") {
        const SectorBasis b(2, 1);
        REQUIRE(b.dim() == 3);
        std::set<std::pair<std::uint32_t, int>> got;
        for (const auto& s : b.states()) {
            got.insert({s.mask, s.photons});
        }
        CHECK(got == std::set<std::pair<std::uint32_t, int>>{{0b01, 0}, {0b10, 0}, {0b00, 1}});
        // ascending mask
        CHECK(b[0] == BasisState{0b00, 1});
        CHECK(b[1] == BasisState{0b01, 0});
        CHECK(b[2] == BasisState{0b10, 0});
    }
    SUBCASE("eight qubits, four excitations") {
        CHECK(SectorBasis(8, 4).dim() == 163);
        CHECK(sector_dimension(8, 4) == 163);
    }
    SUBCASE("ground sector") {
        const SectorBasis b(1, 0);
        REQUIRE(b.dim() == 1);
        CHECK(b[0] == BasisState{0, 0});
    }
    SUBCASE("dimension formula matches brute-force count") {
        for (int nq = 1; nq <= 8; ++nq) {
            for (int n = 0; n <= nq + 2; ++n) {
                std::size_t count = 0;
                for (std::uint32_t m = 0; m < (1u << nq); ++m) {
                    count += std::popcount(m) <= n;
                }
                CHECK(SectorBasis(nq, n).dim() == count);
                CHECK(sector_dimension(nq, n) == count);
            }
        }
    }
    SUBCASE("index lookup") {
        const SectorBasis b(3, 1);
        CHECK(b.index_of(0b011) == -1);
        for (std::size_t i = 0; i < b.dim(); ++i) {
            CHECK(b.index_of(b[i].mask) == std::ptrdiff_t(i));
            CHECK(std::popcount(b[i].mask) + b[i].photons == 1);
        }
    }
}

TEST_CASE("hamiltonian blocks") {
    SUBCASE("single-excitation Jaynes-Cummings, lab frame") {
        SystemParams p = SystemParams::homogeneous(1, 20.0);
        p.lab_frame = true;
        const Eigen::MatrixXcd h = build_hamiltonian(p, 1).to_dense();
        Eigen::MatrixXcd expected(2, 2);
        expected << 1.0, p.g, p.g, 1.0;
        CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("rotating frame removes omega N from the diagonal") {
        SystemParams p = disordered(3);
        const Eigen::MatrixXcd lab = build_hamiltonian(p, 2).to_dense();
        p.lab_frame = false;
        const Eigen::MatrixXcd rot = build_hamiltonian(p, 2).to_dense();
        const Eigen::MatrixXcd shift = 2.0 * p.omega * Eigen::MatrixXcd::Identity(lab.rows(), lab.cols());
        CHECK((lab - shift - rot).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("zero coupling gives a diagonal block") {
        SystemParams p = disordered(4);
        p.g = 0.0;
        for (int n = 0; n <= 5; ++n) {
            const Eigen::MatrixXcd h = build_hamiltonian(p, n).to_dense();
            CHECK((h - Eigen::MatrixXcd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("bosonic matrix elements") {
        SystemParams p = SystemParams::homogeneous(2, 1.0);
        const SectorBasis b(2, 2);
        const SparseBlockOperator h = build_hamiltonian(p, 2);
        const auto i11 = std::size_t(b.index_of(0b11));
        const auto i01 = std::size_t(b.index_of(0b01));
        const auto i00 = std::size_t(b.index_of(0b00));
        CHECK(element(h, i11, i01).real() == doctest::Approx(p.g).epsilon(1e-15));
        CHECK(element(h, i00, i01).real() == doctest::Approx(p.g * std::sqrt(2.0)).epsilon(1e-15));
        CHECK(element(h, i01, i00).real() == doctest::Approx(p.g * std::sqrt(2.0)).epsilon(1e-15));
    }
    SUBCASE("hermitian to machine precision") {
        for (int nq = 1; nq <= 6; ++nq) {
            for (int n = 0; n <= nq; ++n) {
                CHECK(build_hamiltonian(disordered(nq), n).hermiticity_error() < 1e-14);
            }
        }
    }
}

TEST_CASE("sector blocks equal the Kronecker-product hamiltonian entry by entry") {
    for (int nq = 1; nq <= 3; ++nq) {
        const int cutoff = 3;
        const KronSpace space(nq, cutoff);
        const SystemParams p = disordered(nq);
        const Eigen::MatrixXcd full = space.hamiltonian(p);

        // total excitation of every full-space index
        std::vector<int> excitation(std::size_t(full.rows()));
        for (std::uint32_t m = 0; m < (1u << nq); ++m) {
            for (int n = 0; n <= cutoff; ++n) {
                excitation[std::size_t(space.index({m, n}))] = std::popcount(m) + n;
            }
        }
        for (Eigen::Index r = 0; r < full.rows(); ++r) {
            for (Eigen::Index c = 0; c < full.cols(); ++c) {
                if (excitation[std::size_t(r)] != excitation[std::size_t(c)]) {
                    CHECK(full(r, c) == cplx(0.0));
                }
            }
        }
        for (int n = 0; n <= cutoff; ++n) {
            const SectorBasis b(nq, n);
            const Eigen::MatrixXcd block = build_hamiltonian(p, n).to_dense();
            for (std::size_t r = 0; r < b.dim(); ++r) {
                for (std::size_t c = 0; c < b.dim(); ++c) {
                    CHECK(block(Eigen::Index(r), Eigen::Index(c)) ==
                          full(space.index(b[r]), space.index(b[c])));
                }
            }
        }
    }
}

TEST_CASE("lowering operators") {
    const SystemParams p = SystemParams::homogeneous(2, 1.0);
    SUBCASE("photon lowering on two photons") {
        const SparseBlockOperator a = build_lowering(p, Channel::photon_loss(), 2);
        const SectorBasis from(2, 2), to(2, 1);
        CHECK(a.rows == to.dim());
        CHECK(a.cols == from.dim());
        const auto src = std::size_t(from.index_of(0b00));
        const auto dst = std::size_t(to.index_of(0b00));
        CHECK(element(a, dst, src).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }
    SUBCASE("qubit 0 lowering") {
        const SparseBlockOperator s0 = build_lowering(p, Channel::qubit_loss(0), 1);
        const SectorBasis from(2, 1), to(2, 0);
        CHECK(element(s0, std::size_t(to.index_of(0b00)), std::size_t(from.index_of(0b01))) == cplx(1.0));
        for (const auto& e : s0.entries) {
            CHECK(e.col != std::size_t(from.index_of(0b10)));
        }
    }
    SUBCASE("a^dagger a from the lowering blocks is the photon count") {
        for (int n = 1; n <= 4; ++n) {
            const SectorBasis b(3, n);
            const Eigen::MatrixXcd a = build_lowering(SystemParams::homogeneous(3, 1.0), Channel::photon_loss(), n).to_dense();
            const Eigen::MatrixXcd num = a.adjoint() * a;
            for (std::size_t i = 0; i < b.dim(); ++i) {
                CHECK(std::abs(num(Eigen::Index(i), Eigen::Index(i)) - double(b[i].photons)) < 1e-14);
            }
            CHECK((num - Eigen::MatrixXcd(num.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    SUBCASE("lowering blocks match the Kronecker operators") {
        const int nq = 3, cutoff = 4;
        const KronSpace space(nq, cutoff);
        const SystemParams p3 = disordered(nq);
        for (int n = 1; n <= 3; ++n) {
            const SectorBasis from(nq, n), to(nq, n - 1);
            for (int ch = -1; ch < nq; ++ch) {
                const Channel which = ch < 0 ? Channel::photon_loss() : Channel::qubit_loss(ch);
                const Eigen::MatrixXcd& full = ch < 0 ? space.a : space.sm[std::size_t(ch)];
                const Eigen::MatrixXcd block = build_lowering(p3, which, n).to_dense();
                for (std::size_t r = 0; r < to.dim(); ++r) {
                    for (std::size_t c = 0; c < from.dim(); ++c) {
                        CHECK(block(Eigen::Index(r), Eigen::Index(c)) ==
                              full(space.index(to[r]), space.index(from[c])));
                    }
                }
            }
        }
    }
}

TEST_CASE("dephasing blocks") {
    const SectorBasis b(2, 1);
    const Eigen::MatrixXcd z0 = build_dephasing(2, 0, 1).to_dense();
    const auto i01 = Eigen::Index(b.index_of(0b01));
    const auto i00 = Eigen::Index(b.index_of(0b00));
    CHECK(z0(i01, i01) == cplx(1.0));
    CHECK(z0(i00, i00) == cplx(-1.0));
    CHECK(build_dephasing(2, 1, 1).to_dense()(i00, i00) == cplx(-1.0));
    for (int nq = 1; nq <= 4; ++nq) {
        for (int n = 0; n <= nq; ++n) {
            for (int j = 0; j < nq; ++j) {
                const Eigen::MatrixXcd z = build_dephasing(nq, j, n).to_dense();
                CHECK((z * z - Eigen::MatrixXcd::Identity(z.rows(), z.cols())).cwiseAbs().maxCoeff() == 0.0);
            }
        }
    }
}

TEST_CASE("parameter validation") {
    SystemParams p = SystemParams::homogeneous(3, 5.0);
    CHECK_NOTHROW(p.validate());
    SUBCASE("qubit count") {
        p.n_qubits = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("cap") {
        CHECK_THROWS_AS(SystemParams::homogeneous(13, 5.0).validate(), std::invalid_argument);
        CHECK_NOTHROW(SystemParams::homogeneous(13, 5.0).validate(14));
    }
    SUBCASE("negative rate") {
        p.gamma = -1e-3;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("frequency list length") {
        p.epsilons.pop_back();
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("non-finite coupling") {
        p.g = std::nan("");
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}
