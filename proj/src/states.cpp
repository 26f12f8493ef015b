#include "tcsim/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcsim {

namespace {

void check_excitations(int n_qubits, int n_excited) {
    if (n_qubits < 1) {
        throw std::invalid_argument("initial state: n_qubits must be >= 1");
    }
    if (n_excited < 1 || n_excited > n_qubits) {
        throw std::invalid_argument("initial state: need 1 <= n_excited <= n_qubits");
    }
}

}  // namespace

double PureSectorState::norm() const {
    double s = 0.0;
    for (const cplx& a : amplitudes) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

PureSectorState product_state_from_mask(int n_qubits, std::uint32_t excited_mask) {
    const int n_excited = std::popcount(excited_mask);
    check_excitations(n_qubits, n_excited);
    if (n_qubits < 32 && (excited_mask >> n_qubits) != 0) {
        throw std::invalid_argument("initial state: excited mask names qubits beyond n_qubits");
    }
    const SectorBasis basis(n_qubits, n_excited);
    PureSectorState psi{n_qubits, n_excited, std::vector<cplx>(basis.dim())};
    psi.amplitudes[static_cast<std::size_t>(basis.index_of(excited_mask))] = 1.0;
    return psi;
}

PureSectorState product_state(int n_qubits, int n_excited) {
    check_excitations(n_qubits, n_excited);
    const std::uint32_t all = (n_qubits >= 32) ? ~0u : ((1u << n_qubits) - 1u);
    const std::uint32_t low = (1u << (n_qubits - n_excited)) - 1u;
    return product_state_from_mask(n_qubits, all & ~low);
}

PureSectorState dicke_state(int n_qubits, int n_excited) {
    check_excitations(n_qubits, n_excited);
    const SectorBasis basis(n_qubits, n_excited);
    PureSectorState psi{n_qubits, n_excited, std::vector<cplx>(basis.dim())};
    std::size_t count = 0;
    for (const BasisState& s : basis.states()) {
        count += (s.photons == 0) ? 1 : 0;
    }
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        if (basis[i].photons == 0) {
            psi.amplitudes[i] = amp;
        }
    }
    return psi;
}

BlockDensityMatrix::BlockDensityMatrix(int n_qubits, int max_sector)
    : n_qubits_(n_qubits), max_sector_(max_sector) {
    if (max_sector < 0) {
        throw std::invalid_argument("BlockDensityMatrix: negative max sector");
    }
    std::size_t total = 0;
    for (int n = 0; n <= max_sector; ++n) {
        const std::size_t d = sector_dimension(n_qubits, n);
        dims_.push_back(d);
        offsets_.push_back(total);
        total += d * d;
    }
    data_.assign(total, cplx(0.0, 0.0));
}

BlockDensityMatrix BlockDensityMatrix::vacuum(int n_qubits, int max_sector) {
    BlockDensityMatrix rho(n_qubits, max_sector);
    rho.data_[0] = 1.0;
    return rho;
}

BlockDensityMatrix::BlockMap BlockDensityMatrix::block(int sector) {
    const auto d = static_cast<Eigen::Index>(dim(sector));
    return BlockMap(data_.data() + offset(sector), d, d);
}

BlockDensityMatrix::ConstBlockMap BlockDensityMatrix::block(int sector) const {
    const auto d = static_cast<Eigen::Index>(dim(sector));
    return ConstBlockMap(data_.data() + offset(sector), d, d);
}

bool BlockDensityMatrix::same_shape(const BlockDensityMatrix& other) const {
    return n_qubits_ == other.n_qubits_ && max_sector_ == other.max_sector_;
}

double BlockDensityMatrix::trace() const {
    double t = 0.0;
    for (int n = 0; n <= max_sector_; ++n) {
        t += block(n).trace().real();
    }
    return t;
}

double BlockDensityMatrix::hermiticity_error() const {
    double worst = 0.0;
    for (int n = 0; n <= max_sector_; ++n) {
        const auto b = block(n);
        worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff());
    }
    return worst;
}

double BlockDensityMatrix::min_eigenvalue() const {
    double lowest = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= max_sector_; ++n) {
        // symmetrize so round-off asymmetry does not leak into the solver
        const Eigen::MatrixXcd b = block(n);
        const Eigen::MatrixXcd h = 0.5 * (b + b.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, solver.eigenvalues().minCoeff());
    }
    return lowest;
}

BlockDensityMatrix to_density(const PureSectorState& state) {
    BlockDensityMatrix rho(state.n_qubits, state.sector_n);
    const auto d = static_cast<Eigen::Index>(state.amplitudes.size());
    if (static_cast<std::size_t>(d) != rho.dim(state.sector_n)) {
        throw std::invalid_argument("to_density: amplitude vector does not match sector basis");
    }
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes.data(), d);
    rho.block(state.sector_n) = psi * psi.adjoint();
    return rho;
}

}  // namespace tcsim
