#pragma once

#include "tcsim/liouvillian.hpp"
#include "tcsim/observables.hpp"
#include "tcsim/ode.hpp"
#include "tcsim/states.hpp"

#include <functional>
#include <span>
#include <vector>

namespace tcsim {

/// Integration settings. Times are in tau = 4 t g^2 / kappa.
struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 1e-3;
    double max_step = 0.25;
    double tau_max = 10.0;
    /// Stop once n_q + n_ph falls below this fraction of the initial excitation.
    double early_stop_fraction = 1e-4;
    double sample_dtau = 0.005;

    /// Throws std::invalid_argument on non-positive tolerances, steps or horizon.
    void validate() const;
};

/// Runtime guards, checked while integrating.
struct ConservationLimits {
    double trace_drift = 1e-9;
    double hermiticity = 1e-10;
    double min_eigenvalue = -1e-8;
    std::size_t positivity_samples = 10;
};

/// Uniform grid 0, dtau, 2 dtau, ... up to and including tau_max.
std::vector<double> uniform_grid(double tau_max, double dtau);

using SampleObserver = std::function<void(double tau, const BlockDensityMatrix& rho)>;

/// Integrates rho0 in physical time and reports on the tau grid (plus every
/// accepted step end). An empty grid means uniform_grid(tau_max, sample_dtau).
/// Throws IntegrationError (carrying the last good tau) on step underflow or
/// when a conservation guard trips.
ObservableSeries evolve(const LiouvillianCache& cache, const BlockDensityMatrix& rho0,
                        const IntegratorConfig& config, std::span<const double> sample_grid = {},
                        const SampleObserver& observer = {},
                        const ConservationLimits& limits = {});

/// Brute-force model on the full qubits (x) photon space, photon number
/// truncated at `photon_cutoff`. Operators come from Kronecker products of
/// single-site matrices, independent of the sector machinery. Full-space
/// index = mask * (photon_cutoff + 1) + photons.
class DenseModel {
public:
    static constexpr int kMaxQubits = 4;
    static constexpr int kMaxCutoff = 5;

    DenseModel(SystemParams params, int photon_cutoff);

    int dim() const { return dim_; }
    int photon_cutoff() const { return cutoff_; }
    const SystemParams& params() const { return params_; }
    int index(std::uint32_t mask, int photons) const { return int(mask) * (cutoff_ + 1) + photons; }

    const Eigen::MatrixXcd& hamiltonian() const { return h_; }
    const Eigen::MatrixXcd& photon_number() const { return n_ph_; }
    const Eigen::MatrixXcd& qubit_number() const { return n_q_; }
    const Eigen::MatrixXcd& annihilation() const { return a_; }
    const Eigen::MatrixXcd& sigma_minus(int j) const { return sm_[static_cast<std::size_t>(j)]; }

    Eigen::MatrixXcd apply_liouvillian(const Eigen::MatrixXcd& rho) const;

    /// Places every block of `rho` into the full space. Throws if the block
    /// state needs more photons than the cutoff allows.
    Eigen::MatrixXcd embed(const BlockDensityMatrix& rho) const;

private:
    SystemParams params_;
    int cutoff_;
    int dim_;
    Eigen::MatrixXcd h_, n_ph_, n_q_, a_;
    std::vector<Eigen::MatrixXcd> sm_, sz_;
    std::vector<Eigen::MatrixXcd> jumps_;  // sqrt(rate) L
    Eigen::MatrixXcd loss_;                // sum_c L^dagger L (rates included)
};

struct DenseTrajectory {
    std::vector<double> tau;
    std::vector<double> n_ph;
    std::vector<double> n_q;
    std::vector<Eigen::MatrixXcd> states;
};

/// Integrates the full-space master equation with the same integrator and
/// tolerances as `evolve`, reporting exactly on `sample_grid` (tau units).
DenseTrajectory dense_oracle_evolve(const DenseModel& model, const Eigen::MatrixXcd& rho0,
                                    const IntegratorConfig& config,
                                    std::span<const double> sample_grid,
                                    bool keep_states = true);

/// 1/2 sum |eigenvalues(a - b)| for Hermitian a, b.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace tcsim
