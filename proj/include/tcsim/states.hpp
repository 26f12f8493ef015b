#pragma once

#include "tcsim/hilbert.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tcsim {

/// Pure state supported on a single excitation sector.
struct PureSectorState {
    int n_qubits = 1;
    int sector_n = 0;
    std::vector<cplx> amplitudes;  // over SectorBasis(n_qubits, sector_n)

    double norm() const;
};

/// N_ex particular qubits excited, no photons. By default the highest-index
/// qubits are the excited ones; `excited_mask` picks them explicitly.
PureSectorState product_state(int n_qubits, int n_excited);
PureSectorState product_state_from_mask(int n_qubits, std::uint32_t excited_mask);

/// Symmetric (Dicke) state: equal weight 1/sqrt(C(n, k)) on every
/// zero-photon configuration with k excited qubits.
PureSectorState dicke_state(int n_qubits, int n_excited);

// Other families (e.g. antisymmetric subradiant states) only need to fill a
// PureSectorState with zero-photon amplitudes; to_density and evolve take
// any normalized sector state.

/// Density matrix held as one Hermitian block per sector N = 0..max_sector.
/// Blocks are row-major and stored back to back in one contiguous buffer,
/// which the integrator treats as a flat complex vector.
class BlockDensityMatrix {
public:
    using BlockMap = Eigen::Map<MatrixXcdRM>;
    using ConstBlockMap = Eigen::Map<const MatrixXcdRM>;

    BlockDensityMatrix() = default;
    BlockDensityMatrix(int n_qubits, int max_sector);

    /// All weight in the N = 0 sector (cavity and qubits in their ground state).
    static BlockDensityMatrix vacuum(int n_qubits, int max_sector = 0);

    int n_qubits() const { return n_qubits_; }
    int max_sector() const { return max_sector_; }
    std::size_t dim(int sector) const { return dims_.at(static_cast<std::size_t>(sector)); }
    std::size_t offset(int sector) const { return offsets_.at(static_cast<std::size_t>(sector)); }

    BlockMap block(int sector);
    ConstBlockMap block(int sector) const;

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    bool same_shape(const BlockDensityMatrix& other) const;
    double trace() const;
    double hermiticity_error() const;
    /// Smallest eigenvalue over all blocks.
    double min_eigenvalue() const;

private:
    int n_qubits_ = 1;
    int max_sector_ = 0;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> offsets_;
    std::vector<cplx> data_;
};

/// |psi><psi| placed in block `state.sector_n`; lower blocks zero.
BlockDensityMatrix to_density(const PureSectorState& state);

}  // namespace tcsim
