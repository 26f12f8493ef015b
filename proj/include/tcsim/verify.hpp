#pragma once

#include "tcsim/dynamics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tcsim {

struct VerifyOptions {
    IntegratorConfig integrator;
    /// Negative control: added to every off-diagonal Hamiltonian entry of the
    /// block solver (never of the oracles).
    double hamiltonian_perturbation = 0.0;
};

struct VerifyCheck {
    std::string name;
    double observed = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    IntegratorConfig integrator;

    bool all_passed() const;
    void print(std::ostream& os) const;
};

/// Analytic single excitation at several kappa/g, block-vs-dense equivalence,
/// and photon-cutoff insensitivity of the dense oracle.
VerifyReport run_oracle_suite(const VerifyOptions& options = {});

/// Individual oracles, shared with the test suites.
double analytic_max_error(double kappa_over_g, const IntegratorConfig& config,
                          double hamiltonian_perturbation = 0.0);

struct DenseComparison {
    double max_trace_distance = 0.0;
    double max_population_error = 0.0;
};
DenseComparison compare_block_with_dense(const SystemParams& params, const BlockDensityMatrix& rho0,
                                         const IntegratorConfig& config,
                                         const std::vector<double>& grid,
                                         double hamiltonian_perturbation = 0.0);

/// max_tau |n_ph(cutoff) - n_ph(cutoff + extra)| from the dense oracle.
double cutoff_sensitivity(const SystemParams& params, const BlockDensityMatrix& rho0, int extra,
                          const IntegratorConfig& config, const std::vector<double>& grid);

}  // namespace tcsim
