#pragma once

// Block-by-block Lindblad generator
//
//   d rho_N / dt = -i [H_N, rho_N]
//                + sum_c rate_c L_c rho_{N+1} L_c^dagger
//                - 1/2 { sum_c rate_c L_c^dagger L_c, rho_N }
//                + gamma_phi sum_j (Z_j rho_N Z_j - rho_N)
//
// with channels c = cavity loss (rate kappa, L = a) and qubit loss
// (rate gamma, L = sigma_j^-). Only sector-diagonal blocks are stored:
// every term above maps sector-diagonal states to sector-diagonal states.

#include "tcsim/hilbert.hpp"
#include "tcsim/simd/kernels.hpp"
#include "tcsim/states.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tcsim {

/// Shape or size mismatch between inputs; a programming error, not a numerical one.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Precomputed operator blocks for one parameter set, up to `max_sector`.
/// Immutable after construction; share freely between threads.
class LiouvillianCache {
public:
    LiouvillianCache(SystemParams params, int max_sector,
                     const simd::KernelTable& kernels = simd::best_kernels());

    const SystemParams& params() const { return params_; }
    int max_sector() const { return max_sector_; }
    std::size_t dim(int sector) const { return bases_[static_cast<std::size_t>(sector)].dim(); }
    const SectorBasis& basis(int sector) const { return bases_[static_cast<std::size_t>(sector)]; }
    const simd::KernelTable& kernels() const { return *kernels_; }
    /// Flat layout identical to BlockDensityMatrix with the same max sector.
    std::size_t state_size() const { return state_size_; }
    std::size_t block_offset(int sector) const { return offsets_[static_cast<std::size_t>(sector)]; }

    const SparseBlockOperator& hamiltonian(int sector) const;
    /// Channel 0 is the cavity, channel 1 + j is qubit j. Sector >= 1.
    const SparseBlockOperator& lowering(std::size_t channel, int sector) const;
    const SparseBlockOperator& dephasing(int qubit, int sector) const;
    std::size_t n_channels() const { return channels_.size(); }
    double channel_rate(std::size_t channel) const { return rates_[channel]; }

    /// Diagonal of sum_c rate_c L_c^dagger L_c on a sector.
    const std::vector<double>& loss_diagonal(int sector) const;

    /// Photon count and excited-qubit count per basis state.
    const std::vector<double>& photon_counts(int sector) const;
    const std::vector<double>& qubit_counts(int sector) const;

    /// Test hook: adds `delta` to every off-diagonal Hamiltonian entry of the
    /// block cache only, so oracle comparisons can be shown to fail.
    void perturb_hamiltonian(double delta);

    // Fused per-sector data for the fast path.
    struct Jump {
        std::vector<std::int32_t> target;  // per source state; -1 when annihilated
        std::vector<double> amplitude;     // sqrt(rate) * matrix element
    };
    const std::vector<double>& decay_weights(int sector) const;
    const std::vector<Jump>& jumps_into(int sector) const;

private:
    void rebuild_fused();

    SystemParams params_;
    int max_sector_;
    const simd::KernelTable* kernels_;
    std::vector<SectorBasis> bases_;
    std::vector<std::size_t> offsets_;
    std::size_t state_size_ = 0;
    std::vector<Channel> channels_;
    std::vector<double> rates_;
    std::vector<SparseBlockOperator> hamiltonians_;
    std::vector<std::vector<SparseBlockOperator>> lowering_;   // [channel][sector]
    std::vector<std::vector<SparseBlockOperator>> dephasing_;  // [qubit][sector]
    std::vector<std::vector<double>> loss_diag_;
    std::vector<std::vector<double>> photons_;
    std::vector<std::vector<double>> excited_;
    std::vector<std::vector<double>> weights_;           // dim*dim per sector
    std::vector<std::vector<Jump>> jumps_into_;          // [sector][channel], feeding from sector+1
};

/// Scratch space for one evolution. Not shareable between threads.
class LiouvillianWorkspace {
public:
    explicit LiouvillianWorkspace(const LiouvillianCache& cache);
    std::span<cplx> scratch(int sector);

private:
    std::vector<std::vector<cplx>> scratch_;
};

/// d rho / dt on flat block storage (layout of BlockDensityMatrix::data()).
void apply_liouvillian(const LiouvillianCache& cache, std::span<const cplx> rho,
                       std::span<cplx> out, LiouvillianWorkspace& work);

BlockDensityMatrix apply_liouvillian(const LiouvillianCache& cache, const BlockDensityMatrix& rho);

/// Same generator assembled literally from the sparse operator blocks with
/// dense Eigen products. Slow; used to cross-check the fused path.
BlockDensityMatrix apply_liouvillian_reference(const LiouvillianCache& cache,
                                               const BlockDensityMatrix& rho);

}  // namespace tcsim
