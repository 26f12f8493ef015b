#include "tcsim/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tcsim {

SystemParams SystemParams::homogeneous(int n_qubits, double kappa_over_g, double g) {
    SystemParams p;
    p.n_qubits = n_qubits;
    p.g = g;
    p.kappa = kappa_over_g * g;
    p.epsilons.assign(static_cast<std::size_t>(std::max(n_qubits, 0)), p.omega);
    return p;
}

void SystemParams::validate(int max_qubits) const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (n_qubits < 1) {
        fail("n_qubits must be >= 1");
    }
    if (n_qubits > max_qubits) {
        std::ostringstream os;
        os << "n_qubits = " << n_qubits << " exceeds the cap of " << max_qubits;
        fail(os.str());
    }
    if (!(omega > 0.0)) {
        fail("omega must be > 0");
    }
    if (!(g > 0.0) || !std::isfinite(g)) {
        fail("g must be > 0");
    }
    if (!(kappa >= 0.0) || !(gamma >= 0.0) || !(gamma_phi >= 0.0) || !std::isfinite(kappa) ||
        !std::isfinite(gamma) || !std::isfinite(gamma_phi)) {
        fail("kappa, gamma and gamma_phi must be finite and >= 0");
    }
    if (epsilons.size() != static_cast<std::size_t>(n_qubits)) {
        fail("epsilons must list one frequency per qubit");
    }
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 2.0 * omega)) {
            std::ostringstream os;
            os << "qubit frequency " << e << " outside (0, 2*omega)";
            fail(os.str());
        }
    }
}

std::size_t sector_dimension(int n_qubits, int sector_n) {
    std::size_t total = 0;
    std::size_t binom = 1;  // C(n, k)
    for (int k = 0; k <= std::min(sector_n, n_qubits); ++k) {
        total += binom;
        binom = binom * static_cast<std::size_t>(n_qubits - k) / static_cast<std::size_t>(k + 1);
    }
    return total;
}

SectorBasis::SectorBasis(int n_qubits, int sector_n) : n_qubits_(n_qubits), sector_n_(sector_n) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw std::invalid_argument("SectorBasis: n_qubits out of range");
    }
    if (sector_n < 0) {
        throw std::invalid_argument("SectorBasis: negative sector");
    }
    const std::uint32_t n_masks = 1u << n_qubits;
    index_.assign(n_masks, -1);
    states_.reserve(sector_dimension(n_qubits, sector_n));
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const int excited = std::popcount(mask);
        if (excited <= sector_n) {
            index_[mask] = static_cast<std::int32_t>(states_.size());
            states_.push_back({mask, sector_n - excited});
        }
    }
}

std::ptrdiff_t SectorBasis::index_of(std::uint32_t mask) const {
    if (mask >= index_.size()) {
        return -1;
    }
    return index_[mask];
}

SectorBasis enumerate_sector(int n_qubits, int sector_n) { return SectorBasis(n_qubits, sector_n); }

Eigen::MatrixXcd SparseBlockOperator::to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
    for (const auto& e : entries) {
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
    }
    return m;
}

namespace {

void sort_entries(std::vector<SparseBlockOperator::Entry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
}

}  // namespace

SparseBlockOperator SparseBlockOperator::adjoint() const {
    SparseBlockOperator out;
    out.source_sector = target_sector;
    out.target_sector = source_sector;
    out.rows = cols;
    out.cols = rows;
    out.entries.reserve(entries.size());
    for (const auto& e : entries) {
        out.entries.push_back({e.col, e.row, std::conj(e.value)});
    }
    sort_entries(out.entries);
    return out;
}

double SparseBlockOperator::hermiticity_error() const {
    const Eigen::MatrixXcd d = to_dense();
    if (d.rows() != d.cols()) {
        throw std::logic_error("hermiticity_error: block is not square");
    }
    return d.rows() == 0 ? 0.0 : (d - d.adjoint()).cwiseAbs().maxCoeff();
}

SparseBlockOperator build_hamiltonian(const SystemParams& params, int sector_n) {
    const SectorBasis basis(params.n_qubits, sector_n);
    const double frame = params.lab_frame ? 0.0 : params.omega;

    SparseBlockOperator h;
    h.source_sector = sector_n;
    h.target_sector = sector_n;
    h.rows = h.cols = basis.dim();

    for (std::size_t col = 0; col < basis.dim(); ++col) {
        const BasisState s = basis[col];
        double diag = (params.omega - frame) * s.photons;
        for (int j = 0; j < params.n_qubits; ++j) {
            if (s.mask & (1u << j)) {
                diag += params.epsilons[static_cast<std::size_t>(j)] - frame;
            }
        }
        h.entries.push_back({col, col, cplx(diag, 0.0)});

        for (int j = 0; j < params.n_qubits; ++j) {
            const std::uint32_t bit = 1u << j;
            if (s.mask & bit) {
                // a^dagger sigma_j^- : qubit j down, photon up
                const auto row = static_cast<std::size_t>(basis.index_of(s.mask & ~bit));
                const double amp = params.g * std::sqrt(static_cast<double>(s.photons + 1));
                h.entries.push_back({row, col, cplx(amp, 0.0)});
            } else if (s.photons > 0) {
                // a sigma_j^+ : qubit j up, photon down
                const auto row = static_cast<std::size_t>(basis.index_of(s.mask | bit));
                const double amp = params.g * std::sqrt(static_cast<double>(s.photons));
                h.entries.push_back({row, col, cplx(amp, 0.0)});
            }
        }
    }
    sort_entries(h.entries);
    return h;
}

SparseBlockOperator build_lowering(const SystemParams& params, Channel which, int sector_n) {
    if (sector_n < 1) {
        throw std::invalid_argument("build_lowering: sector must be >= 1");
    }
    if (which.kind == Channel::Kind::qubit && (which.qubit < 0 || which.qubit >= params.n_qubits)) {
        throw std::invalid_argument("build_lowering: qubit index out of range");
    }
    const SectorBasis source(params.n_qubits, sector_n);
    const SectorBasis target(params.n_qubits, sector_n - 1);

    SparseBlockOperator op;
    op.source_sector = sector_n;
    op.target_sector = sector_n - 1;
    op.rows = target.dim();
    op.cols = source.dim();
    for (std::size_t col = 0; col < source.dim(); ++col) {
        const BasisState s = source[col];
        if (which.kind == Channel::Kind::photon) {
            if (s.photons > 0) {
                const auto row = static_cast<std::size_t>(target.index_of(s.mask));
                op.entries.push_back({row, col, cplx(std::sqrt(double(s.photons)), 0.0)});
            }
        } else {
            const std::uint32_t bit = 1u << which.qubit;
            if (s.mask & bit) {
                const auto row = static_cast<std::size_t>(target.index_of(s.mask & ~bit));
                op.entries.push_back({row, col, cplx(1.0, 0.0)});
            }
        }
    }
    sort_entries(op.entries);
    return op;
}

SparseBlockOperator build_dephasing(int n_qubits, int j, int sector_n) {
    if (j < 0 || j >= n_qubits) {
        throw std::invalid_argument("build_dephasing: qubit index out of range");
    }
    const SectorBasis basis(n_qubits, sector_n);
    SparseBlockOperator z;
    z.source_sector = z.target_sector = sector_n;
    z.rows = z.cols = basis.dim();
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const double sign = (basis[i].mask & (1u << j)) ? 1.0 : -1.0;
        z.entries.push_back({i, i, cplx(sign, 0.0)});
    }
    return z;
}

}  // namespace tcsim
