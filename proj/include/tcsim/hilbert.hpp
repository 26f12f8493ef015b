#pragma once

// Excitation-number sectors of the qubits (x) cavity-mode space and the
// sparse operator blocks of the RWA Tavis-Cummings model.
//
// A basis state is (qubit bitmask, photon count) with popcount + photons = N.
// Bit j of the mask is qubit j; within a sector the photon count is implied
// by the mask, so states are ordered by ascending mask.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tcsim {

using cplx = std::complex<double>;
using MatrixXcdRM = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kDefaultMaxQubits = 12;
inline constexpr double kDefaultCoupling = 0.012;  // g / omega

/// Physical parameters in units where the cavity frequency omega = 1.
struct SystemParams {
    int n_qubits = 1;
    double omega = 1.0;
    double g = kDefaultCoupling;
    std::vector<double> epsilons;  // one transition frequency per qubit
    double kappa = 0.0;
    double gamma = 0.0;
    double gamma_phi = 0.0;
    // false: frame rotating at omega (diagonal shifted by -omega * N per sector)
    bool lab_frame = false;

    /// Resonant ensemble: every epsilon equals omega, kappa = kappa_over_g * g.
    static SystemParams homogeneous(int n_qubits, double kappa_over_g,
                                    double g = kDefaultCoupling);

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate(int max_qubits = kDefaultMaxQubits) const;

    double purcell_rate() const { return 4.0 * g * g / kappa; }  // dtau/dt
};

struct BasisState {
    std::uint32_t mask;
    int photons;

    friend bool operator==(const BasisState&, const BasisState&) = default;
};

class SectorBasis {
public:
    SectorBasis(int n_qubits, int sector_n);

    int n_qubits() const { return n_qubits_; }
    int sector() const { return sector_n_; }
    std::size_t dim() const { return states_.size(); }
    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& operator[](std::size_t i) const { return states_[i]; }

    /// Index of the state with this qubit mask, or -1 if it is not in the sector.
    std::ptrdiff_t index_of(std::uint32_t mask) const;

private:
    int n_qubits_;
    int sector_n_;
    std::vector<BasisState> states_;
    std::vector<std::int32_t> index_;  // by mask, -1 when absent
};

SectorBasis enumerate_sector(int n_qubits, int sector_n);

/// Sum_{k=0}^{min(N, n_qubits)} C(n_qubits, k).
std::size_t sector_dimension(int n_qubits, int sector_n);

/// Coordinate-list block mapping sector `source_sector` into `target_sector`.
struct SparseBlockOperator {
    struct Entry {
        std::size_t row;
        std::size_t col;
        cplx value;
    };

    int source_sector = 0;
    int target_sector = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Entry> entries;  // sorted by (row, col), no duplicates

    Eigen::MatrixXcd to_dense() const;
    SparseBlockOperator adjoint() const;
    /// max |A - A^dagger| over entries; only meaningful for square blocks.
    double hermiticity_error() const;
};

struct Channel {
    enum class Kind { photon, qubit };
    Kind kind = Kind::photon;
    int qubit = -1;

    static Channel photon_loss() { return {Kind::photon, -1}; }
    static Channel qubit_loss(int j) { return {Kind::qubit, j}; }
};

/// Within-sector Hamiltonian block. Diagonal: sum_j eps_j bit_j + omega * photons
/// (minus omega * N in the rotating frame); off-diagonal g * sqrt(photons + 1)
/// between states linked by one qubit flip-down and one photon created.
SparseBlockOperator build_hamiltonian(const SystemParams& params, int sector_n);

/// Bare lowering operator (a or sigma_j^-) from sector N to N - 1.
SparseBlockOperator build_lowering(const SystemParams& params, Channel which, int sector_n);

/// Diagonal sigma_j^z block: +1 where qubit j is excited, -1 otherwise.
SparseBlockOperator build_dephasing(int n_qubits, int j, int sector_n);

}  // namespace tcsim
