#include "tcsim/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace tcsim {

Populations expectations(const BlockDensityMatrix& rho) {
    Populations p;
    for (int n = 0; n <= rho.max_sector(); ++n) {
        const SectorBasis basis(rho.n_qubits(), n);
        const auto b = rho.block(n);
        for (std::size_t i = 0; i < basis.dim(); ++i) {
            const double pop = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
            p.n_ph += pop * basis[i].photons;
            p.n_q += pop * std::popcount(basis[i].mask);
        }
    }
    return p;
}

Populations expectations(const LiouvillianCache& cache, std::span<const cplx> rho) {
    if (rho.size() != cache.state_size()) {
        throw StructuralError("expectations: state size does not match the cache");
    }
    Populations p;
    for (int n = 0; n <= cache.max_sector(); ++n) {
        const std::size_t d = cache.dim(n);
        const cplx* r = rho.data() + cache.block_offset(n);
        const auto& ph = cache.photon_counts(n);
        const auto& ex = cache.qubit_counts(n);
        for (std::size_t i = 0; i < d; ++i) {
            const double pop = r[i * d + i].real();
            p.n_ph += pop * ph[i];
            p.n_q += pop * ex[i];
        }
    }
    return p;
}

PopulationRates exact_rates(const LiouvillianCache& cache, std::span<const cplx> rho) {
    if (rho.size() != cache.state_size()) {
        throw StructuralError("exact_rates: state size does not match the cache");
    }
    PopulationRates dt;  // per unit physical time first
    for (int n = 0; n <= cache.max_sector(); ++n) {
        const std::size_t d = cache.dim(n);
        const cplx* r = rho.data() + cache.block_offset(n);
        const auto& ph = cache.photon_counts(n);
        const auto& ex = cache.qubit_counts(n);
        const auto& loss = cache.loss_diagonal(n);

        std::vector<double> diag(d, 0.0);
        // (-i [H, rho])_kk = 2 Im sum_m H_km rho_mk
        for (const auto& e : cache.hamiltonian(n).entries) {
            diag[e.row] += 2.0 * (e.value * r[e.col * d + e.row]).imag();
        }
        for (std::size_t i = 0; i < d; ++i) {
            diag[i] -= loss[i] * r[i * d + i].real();
        }
        if (n < cache.max_sector()) {
            const std::size_t ds = cache.dim(n + 1);
            const cplx* src = rho.data() + cache.block_offset(n + 1);
            for (const auto& jump : cache.jumps_into(n)) {
                for (std::size_t k = 0; k < ds; ++k) {
                    if (jump.target[k] >= 0) {
                        diag[static_cast<std::size_t>(jump.target[k])] +=
                            jump.amplitude[k] * jump.amplitude[k] * src[k * ds + k].real();
                    }
                }
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            dt.n_ph += ph[i] * diag[i];
            dt.n_q += ex[i] * diag[i];
        }
    }
    // a vanishing rate stays zero even when g = 0 leaves tau undefined
    const double per_tau = 1.0 / cache.params().purcell_rate();
    auto scale = [per_tau](double r) { return r == 0.0 ? 0.0 : r * per_tau; };
    return {scale(dt.n_ph), scale(dt.n_q)};
}

PopulationRates exact_rates(const LiouvillianCache& cache, const BlockDensityMatrix& rho) {
    return exact_rates(cache, rho.data());
}

double loss_rate(const LiouvillianCache& cache, const Populations& pops) {
    const SystemParams& p = cache.params();
    return (p.kappa * pops.n_ph + p.gamma * pops.n_q) / p.purcell_rate();
}

void ObservableSeries::push(double t, const Populations& p, const PopulationRates& r) {
    tau.push_back(t);
    n_ph.push_back(p.n_ph);
    n_q.push_back(p.n_q);
    rate_n_ph.push_back(r.n_ph);
    rate_n_q.push_back(r.n_q);
}

Peak refined_maximum(std::span<const double> tau, std::span<const double> values) {
    if (tau.empty() || tau.size() != values.size()) {
        throw StructuralError("refined_maximum: empty or misaligned series");
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    Peak peak{tau[best], values[best]};
    if (best == 0 || best + 1 >= values.size()) {
        return peak;
    }
    const double x0 = tau[best - 1], x1 = tau[best], x2 = tau[best + 1];
    const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
    const double f01 = (y1 - y0) / (x1 - x0);
    const double f12 = (y2 - y1) / (x2 - x1);
    const double curv = (f12 - f01) / (x2 - x0);
    if (!(curv < 0.0)) {
        return peak;
    }
    const double x_star = 0.5 * (x0 + x1) - f01 / (2.0 * curv);
    if (!(x_star >= x0 && x_star <= x2)) {
        return peak;
    }
    const double y_star = y0 + f01 * (x_star - x0) + curv * (x_star - x0) * (x_star - x1);
    if (y_star >= y1) {
        peak = {x_star, y_star};
    }
    return peak;
}

RunMetrics extract_metrics(const ObservableSeries& series, int n_excited) {
    if (series.size() == 0) {
        throw StructuralError("extract_metrics: empty series");
    }
    if (n_excited < 1) {
        throw StructuralError("extract_metrics: n_excited must be >= 1");
    }
    std::vector<double> emission(series.rate_n_q.size());
    std::transform(series.rate_n_q.begin(), series.rate_n_q.end(), emission.begin(),
                   [](double r) { return -r; });

    const Peak photons = refined_maximum(series.tau, series.n_ph);
    const Peak growth = refined_maximum(series.tau, series.rate_n_ph);
    const Peak emit = refined_maximum(series.tau, emission);

    RunMetrics m;
    m.n_excited = n_excited;
    m.max_n_ph = std::max(0.0, photons.value);
    m.max_rate_n_ph = std::max(0.0, growth.value);
    m.max_emission_rate = std::max(0.0, emit.value);
    m.per_excitation_emission = m.max_emission_rate / n_excited;
    m.argmax_tau_n_ph = photons.tau;
    m.argmax_tau_rate_n_ph = growth.tau;
    m.argmax_tau_emission = emit.tau;
    return m;
}

}  // namespace tcsim
