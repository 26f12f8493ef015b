#include "tcsim/liouvillian.hpp"

#include <bit>
#include <cmath>

namespace tcsim {

LiouvillianCache::LiouvillianCache(SystemParams params, int max_sector,
                                   const simd::KernelTable& kernels)
    : params_(std::move(params)), max_sector_(max_sector), kernels_(&kernels) {
    if (max_sector_ < 0) {
        throw StructuralError("LiouvillianCache: negative max sector");
    }
    if (params_.n_qubits < 1 || params_.epsilons.size() != static_cast<std::size_t>(params_.n_qubits)) {
        throw StructuralError("LiouvillianCache: epsilons must list one frequency per qubit");
    }
    const int nq = params_.n_qubits;

    channels_.push_back(Channel::photon_loss());
    rates_.push_back(params_.kappa);
    for (int j = 0; j < nq; ++j) {
        channels_.push_back(Channel::qubit_loss(j));
        rates_.push_back(params_.gamma);
    }

    lowering_.resize(channels_.size());
    dephasing_.resize(static_cast<std::size_t>(nq));
    for (int n = 0; n <= max_sector_; ++n) {
        bases_.emplace_back(nq, n);
        hamiltonians_.push_back(build_hamiltonian(params_, n));
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            // sector 0 has nothing to lower; keep an empty placeholder so indices line up
            lowering_[c].push_back(n >= 1 ? build_lowering(params_, channels_[c], n)
                                          : SparseBlockOperator{});
        }
        for (int j = 0; j < nq; ++j) {
            dephasing_[static_cast<std::size_t>(j)].push_back(build_dephasing(nq, j, n));
        }

        const SectorBasis& b = bases_.back();
        std::vector<double> loss(b.dim());
        std::vector<double> ph(b.dim());
        std::vector<double> ex(b.dim());
        for (std::size_t i = 0; i < b.dim(); ++i) {
            ph[i] = b[i].photons;
            ex[i] = std::popcount(b[i].mask);
            loss[i] = params_.kappa * ph[i] + params_.gamma * ex[i];
        }
        offsets_.push_back(state_size_);
        state_size_ += b.dim() * b.dim();
        loss_diag_.push_back(std::move(loss));
        photons_.push_back(std::move(ph));
        excited_.push_back(std::move(ex));
    }
    rebuild_fused();
}

void LiouvillianCache::rebuild_fused() {
    weights_.clear();
    jumps_into_.clear();
    for (int n = 0; n <= max_sector_; ++n) {
        const SectorBasis& b = bases_[static_cast<std::size_t>(n)];
        const std::size_t d = b.dim();
        const auto& loss = loss_diag_[static_cast<std::size_t>(n)];
        std::vector<double> w(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t s = 0; s < d; ++s) {
                // Z_j rho Z_j - rho vanishes unless qubit j differs between r and s, then -2 rho
                const int differing = std::popcount(b[r].mask ^ b[s].mask);
                w[r * d + s] = -0.5 * (loss[r] + loss[s]) - 2.0 * params_.gamma_phi * differing;
            }
        }
        weights_.push_back(std::move(w));

        std::vector<Jump> feeds;
        if (n < max_sector_) {
            const std::size_t src_dim = bases_[static_cast<std::size_t>(n + 1)].dim();
            for (std::size_t c = 0; c < channels_.size(); ++c) {
                if (rates_[c] == 0.0) {
                    continue;
                }
                Jump jump{std::vector<std::int32_t>(src_dim, -1), std::vector<double>(src_dim, 0.0)};
                const double root_rate = std::sqrt(rates_[c]);
                for (const auto& e : lowering_[c][static_cast<std::size_t>(n + 1)].entries) {
                    jump.target[e.col] = static_cast<std::int32_t>(e.row);
                    jump.amplitude[e.col] = root_rate * e.value.real();
                }
                feeds.push_back(std::move(jump));
            }
        }
        jumps_into_.push_back(std::move(feeds));
    }
}

const SparseBlockOperator& LiouvillianCache::hamiltonian(int sector) const {
    return hamiltonians_.at(static_cast<std::size_t>(sector));
}

const SparseBlockOperator& LiouvillianCache::lowering(std::size_t channel, int sector) const {
    if (sector < 1) {
        throw StructuralError("lowering: sector must be >= 1");
    }
    return lowering_.at(channel).at(static_cast<std::size_t>(sector));
}

const SparseBlockOperator& LiouvillianCache::dephasing(int qubit, int sector) const {
    return dephasing_.at(static_cast<std::size_t>(qubit)).at(static_cast<std::size_t>(sector));
}

const std::vector<double>& LiouvillianCache::loss_diagonal(int sector) const {
    return loss_diag_.at(static_cast<std::size_t>(sector));
}
const std::vector<double>& LiouvillianCache::photon_counts(int sector) const {
    return photons_.at(static_cast<std::size_t>(sector));
}
const std::vector<double>& LiouvillianCache::qubit_counts(int sector) const {
    return excited_.at(static_cast<std::size_t>(sector));
}
const std::vector<double>& LiouvillianCache::decay_weights(int sector) const {
    return weights_.at(static_cast<std::size_t>(sector));
}
const std::vector<LiouvillianCache::Jump>& LiouvillianCache::jumps_into(int sector) const {
    return jumps_into_.at(static_cast<std::size_t>(sector));
}

void LiouvillianCache::perturb_hamiltonian(double delta) {
    for (auto& h : hamiltonians_) {
        for (auto& e : h.entries) {
            if (e.row != e.col) {
                e.value += delta;
            }
        }
    }
}

LiouvillianWorkspace::LiouvillianWorkspace(const LiouvillianCache& cache) {
    for (int n = 0; n <= cache.max_sector(); ++n) {
        scratch_.emplace_back(cache.dim(n) * cache.dim(n));
    }
}

std::span<cplx> LiouvillianWorkspace::scratch(int sector) {
    return scratch_.at(static_cast<std::size_t>(sector));
}

void apply_liouvillian(const LiouvillianCache& cache, std::span<const cplx> rho,
                       std::span<cplx> out, LiouvillianWorkspace& work) {
    const std::size_t total = cache.state_size();
    if (rho.size() != total || out.size() != total) {
        throw StructuralError("apply_liouvillian: state size does not match the cache");
    }
    const simd::KernelTable& k = cache.kernels();

    for (int n = 0; n <= cache.max_sector(); ++n) {
        const std::size_t d = cache.dim(n);
        const cplx* r = rho.data() + cache.block_offset(n);
        cplx* o = out.data() + cache.block_offset(n);

        // A = H rho, row by row
        std::span<cplx> a = work.scratch(n);
        std::fill(a.begin(), a.end(), cplx(0.0, 0.0));
        for (const auto& e : cache.hamiltonian(n).entries) {
            k.caxpy(d, e.value, r + e.col * d, a.data() + e.row * d);
        }
        // -i [H, rho] = -i (A - A^dagger) for Hermitian rho
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const cplx aij = a[i * d + j];
                const cplx aji = a[j * d + i];
                o[i * d + j] = cplx(aij.imag() + aji.imag(), aji.real() - aij.real());
            }
        }
        // anticommutator and dephasing, elementwise
        k.weighted_accumulate(d * d, cache.decay_weights(n).data(), r, o);

        // quantum jumps feeding down from sector n + 1
        if (n < cache.max_sector()) {
            const std::size_t ds = cache.dim(n + 1);
            const cplx* src = rho.data() + cache.block_offset(n + 1);
            for (const auto& jump : cache.jumps_into(n)) {
                for (std::size_t k1 = 0; k1 < ds; ++k1) {
                    const std::int32_t t1 = jump.target[k1];
                    if (t1 < 0) {
                        continue;
                    }
                    const double a1 = jump.amplitude[k1];
                    cplx* orow = o + static_cast<std::size_t>(t1) * d;
                    const cplx* srow = src + k1 * ds;
                    for (std::size_t k2 = 0; k2 < ds; ++k2) {
                        const std::int32_t t2 = jump.target[k2];
                        if (t2 >= 0) {
                            orow[t2] += (a1 * jump.amplitude[k2]) * srow[k2];
                        }
                    }
                }
            }
        }
    }
}

BlockDensityMatrix apply_liouvillian(const LiouvillianCache& cache, const BlockDensityMatrix& rho) {
    if (rho.n_qubits() != cache.params().n_qubits || rho.max_sector() != cache.max_sector()) {
        throw StructuralError("apply_liouvillian: density matrix shape does not match the cache");
    }
    BlockDensityMatrix out(rho.n_qubits(), rho.max_sector());
    LiouvillianWorkspace work(cache);
    apply_liouvillian(cache, rho.data(), out.data(), work);
    return out;
}

BlockDensityMatrix apply_liouvillian_reference(const LiouvillianCache& cache,
                                               const BlockDensityMatrix& rho) {
    if (rho.n_qubits() != cache.params().n_qubits || rho.max_sector() != cache.max_sector()) {
        throw StructuralError("apply_liouvillian_reference: shape mismatch");
    }
    const SystemParams& p = cache.params();
    BlockDensityMatrix out(rho.n_qubits(), rho.max_sector());
    for (int n = 0; n <= cache.max_sector(); ++n) {
        const Eigen::MatrixXcd r = rho.block(n);
        const Eigen::MatrixXcd h = cache.hamiltonian(n).to_dense();
        const cplx minus_i(0.0, -1.0);
        Eigen::MatrixXcd d = minus_i * (h * r - r * h);

        for (std::size_t c = 0; c < cache.n_channels(); ++c) {
            const double rate = cache.channel_rate(c);
            if (n >= 1) {
                const Eigen::MatrixXcd l = cache.lowering(c, n).to_dense();
                const Eigen::MatrixXcd ldl = l.adjoint() * l;
                d -= 0.5 * rate * (ldl * r + r * ldl);
            }
            if (n < cache.max_sector()) {
                const Eigen::MatrixXcd l = cache.lowering(c, n + 1).to_dense();
                const Eigen::MatrixXcd upper = rho.block(n + 1);
                d += rate * (l * upper * l.adjoint());
            }
        }
        for (int j = 0; j < p.n_qubits; ++j) {
            const Eigen::MatrixXcd z = cache.dephasing(j, n).to_dense();
            d += p.gamma_phi * (z * r * z - r);
        }
        out.block(n) = d;
    }
    return out;
}

}  // namespace tcsim
