#pragma once

#include "tcsim/liouvillian.hpp"
#include "tcsim/states.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tcsim {

struct Populations {
    double n_ph = 0.0;  // mean photon number
    double n_q = 0.0;   // total excited-qubit population
};

/// Rates in dimensionless time tau = 4 t g^2 / kappa.
struct PopulationRates {
    double n_ph = 0.0;
    double n_q = 0.0;
};

Populations expectations(const BlockDensityMatrix& rho);
Populations expectations(const LiouvillianCache& cache, std::span<const cplx> rho);

/// tr(O L[rho]) for O = a^dagger a and sum_j sigma_j^+ sigma_j^-, scaled to
/// d/dtau. Only the diagonal of L[rho] is formed, so the cost is linear in
/// the number of stored operator entries.
PopulationRates exact_rates(const LiouvillianCache& cache, std::span<const cplx> rho);
PopulationRates exact_rates(const LiouvillianCache& cache, const BlockDensityMatrix& rho);

/// Loss out of the system, kappa n_ph + gamma n_q, in per-tau units.
double loss_rate(const LiouvillianCache& cache, const Populations& pops);

struct EvolutionDiagnostics {
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double max_balance_residual = 0.0;
    std::size_t positivity_checks = 0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    bool early_stopped = false;
};

struct ObservableSeries {
    std::vector<double> tau;
    std::vector<double> n_ph;
    std::vector<double> n_q;
    std::vector<double> rate_n_ph;  // d n_ph / d tau
    std::vector<double> rate_n_q;   // d n_q / d tau
    EvolutionDiagnostics diagnostics;

    std::size_t size() const { return tau.size(); }
    void push(double t, const Populations& p, const PopulationRates& r);
};

struct RunMetrics {
    int n_excited = 0;
    double max_n_ph = 0.0;
    double max_rate_n_ph = 0.0;
    double max_emission_rate = 0.0;  // max over tau of -d n_q / d tau
    double per_excitation_emission = 0.0;
    double argmax_tau_n_ph = 0.0;
    double argmax_tau_rate_n_ph = 0.0;
    double argmax_tau_emission = 0.0;
};

/// Location and value of a sampled maximum, refined by the parabola through
/// the best sample and its two neighbours (non-uniform spacing allowed).
struct Peak {
    double tau = 0.0;
    double value = 0.0;
};
Peak refined_maximum(std::span<const double> tau, std::span<const double> values);

/// Throws StructuralError on an empty series or when n_excited < 1.
RunMetrics extract_metrics(const ObservableSeries& series, int n_excited);

}  // namespace tcsim
