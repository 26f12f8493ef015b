#include "tcsim/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tcsim {

void IntegratorConfig::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(rel_tol) || !positive(abs_tol)) {
        throw std::invalid_argument("integrator tolerances must be > 0");
    }
    if (!positive(tau_max)) {
        throw std::invalid_argument("tau_max must be > 0");
    }
    if (!positive(initial_step) || !positive(max_step)) {
        throw std::invalid_argument("initial_step and max_step must be > 0");
    }
    if (!positive(sample_dtau)) {
        throw std::invalid_argument("sample_dtau must be > 0");
    }
    if (!(early_stop_fraction >= 0.0 && early_stop_fraction < 1.0)) {
        throw std::invalid_argument("early_stop_fraction must lie in [0, 1)");
    }
}

std::vector<double> uniform_grid(double tau_max, double dtau) {
    if (!(dtau > 0.0) || !(tau_max >= 0.0)) {
        throw std::invalid_argument("uniform_grid: need dtau > 0 and tau_max >= 0");
    }
    const auto n = static_cast<std::size_t>(std::floor(tau_max / dtau + 1e-9));
    std::vector<double> grid;
    grid.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) {
        grid.push_back(static_cast<double>(i) * dtau);
    }
    if (tau_max - grid.back() > 1e-12 * std::max(1.0, tau_max)) {
        grid.push_back(tau_max);
    }
    return grid;
}

namespace {

void check_runnable(const SystemParams& p) {
    if (!(p.kappa > 0.0)) {
        throw std::invalid_argument("evolution needs kappa > 0 (tau = 4 t g^2 / kappa)");
    }
    if (!(p.g > 0.0)) {
        throw std::invalid_argument("evolution needs g > 0");
    }
}

std::vector<double> effective_grid(std::span<const double> grid, const IntegratorConfig& config) {
    std::vector<double> out;
    if (grid.empty()) {
        out = uniform_grid(config.tau_max, config.sample_dtau);
    } else {
        out.assign(grid.begin(), grid.end());
        if (!std::is_sorted(out.begin(), out.end()) || out.front() < 0.0) {
            throw std::invalid_argument("sample grid must be sorted and non-negative");
        }
    }
    return out;
}

OdeOptions ode_options(const IntegratorConfig& config, double t_per_tau) {
    OdeOptions o;
    o.rel_tol = config.rel_tol;
    o.abs_tol = config.abs_tol;
    o.initial_step = config.initial_step * t_per_tau;
    o.max_step = config.max_step * t_per_tau;
    return o;
}

}  // namespace

ObservableSeries evolve(const LiouvillianCache& cache, const BlockDensityMatrix& rho0,
                        const IntegratorConfig& config, std::span<const double> sample_grid,
                        const SampleObserver& observer, const ConservationLimits& limits) {
    config.validate();
    const SystemParams& params = cache.params();
    check_runnable(params);
    if (rho0.n_qubits() != params.n_qubits || rho0.max_sector() != cache.max_sector()) {
        throw StructuralError("evolve: initial state shape does not match the cache");
    }

    const std::vector<double> grid = effective_grid(sample_grid, config);
    const double t_per_tau = 1.0 / params.purcell_rate();
    const double tau_end = std::min(config.tau_max, grid.empty() ? config.tau_max : grid.back());
    const double t_end = tau_end * t_per_tau;

    LiouvillianWorkspace work(cache);
    DormandPrince45 ode(
        cache.state_size(),
        [&](std::span<const cplx> y, std::span<cplx> dy) { apply_liouvillian(cache, y, dy, work); },
        ode_options(config, t_per_tau), cache.kernels());

    ObservableSeries series;
    EvolutionDiagnostics& diag = series.diagnostics;
    diag.min_eigenvalue = rho0.min_eigenvalue();

    BlockDensityMatrix current(rho0.n_qubits(), rho0.max_sector());
    const double trace0 = rho0.trace();
    const Populations start = expectations(cache, rho0.data());
    const double stop_level = config.early_stop_fraction * (start.n_q + start.n_ph);

    // evenly spaced positivity checkpoints on the grid
    std::vector<std::size_t> checkpoints;
    if (!grid.empty() && limits.positivity_samples > 0) {
        const std::size_t m = limits.positivity_samples;
        for (std::size_t k = 0; k < m; ++k) {
            checkpoints.push_back(m == 1 ? 0 : k * (grid.size() - 1) / (m - 1));
        }
    }
    auto is_checkpoint = [&](std::size_t i) {
        return std::binary_search(checkpoints.begin(), checkpoints.end(), i);
    };

    auto fail = [&](const std::string& what, double tau) {
        std::ostringstream os;
        os << what << " at tau = " << tau;
        throw IntegrationError(os.str(), tau);
    };

    auto record = [&](double tau, std::span<const cplx> y, bool on_grid, std::size_t grid_index) {
        const Populations pops = expectations(cache, y);
        const PopulationRates rates = exact_rates(cache, y);
        series.push(tau, pops, rates);
        const double balance = rates.n_q + rates.n_ph + loss_rate(cache, pops);
        diag.max_balance_residual = std::max(diag.max_balance_residual, std::abs(balance));
        if (!on_grid) {
            return;
        }
        std::copy(y.begin(), y.end(), current.data().begin());
        const double herm = current.hermiticity_error();
        diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, herm);
        if (herm > limits.hermiticity) {
            fail("Hermiticity violated (" + std::to_string(herm) + ")", tau);
        }
        if (is_checkpoint(grid_index)) {
            const double lowest = current.min_eigenvalue();
            ++diag.positivity_checks;
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, lowest);
            if (lowest < limits.min_eigenvalue) {
                fail("positivity violated (min eigenvalue " + std::to_string(lowest) + ")", tau);
            }
        }
        if (observer) {
            observer(tau, current);
        }
    };

    ode.reset(0.0, rho0.data());
    std::vector<cplx> sample(cache.state_size());
    std::size_t next = 0;
    // samples at tau = 0
    while (next < grid.size() && grid[next] <= 0.0) {
        record(grid[next], ode.y(), true, next);
        ++next;
    }
    if (grid.empty() || grid.front() > 0.0) {
        record(0.0, ode.y(), false, 0);
    }

    while (ode.t() < t_end) {
        ode.step(t_end);
        const double tau_prev = ode.t_previous() / t_per_tau;
        const double tau_now = ode.t() >= t_end ? tau_end : ode.t() / t_per_tau;

        double trace = 0.0;
        for (int n = 0; n <= cache.max_sector(); ++n) {
            const std::size_t d = cache.dim(n);
            const cplx* r = ode.y().data() + cache.block_offset(n);
            for (std::size_t i = 0; i < d; ++i) {
                trace += r[i * d + i].real();
            }
        }
        const double drift = std::abs(trace - trace0);
        diag.max_trace_drift = std::max(diag.max_trace_drift, drift);
        if (!(drift <= limits.trace_drift)) {
            fail("trace drift " + std::to_string(drift) + " exceeds limit", tau_prev);
        }

        bool endpoint_on_grid = false;
        while (next < grid.size() && grid[next] <= tau_now) {
            if (grid[next] >= tau_now) {
                record(grid[next], ode.y(), true, next);
                endpoint_on_grid = true;
            } else {
                ode.dense_output(std::max(grid[next], tau_prev) * t_per_tau, sample);
                record(grid[next], sample, true, next);
            }
            ++next;
        }
        if (!endpoint_on_grid) {
            record(tau_now, ode.y(), false, 0);
        }

        const Populations now{series.n_ph.back(), series.n_q.back()};
        if (now.n_q + now.n_ph < stop_level) {
            diag.early_stopped = true;
            std::copy(ode.y().begin(), ode.y().end(), current.data().begin());
            const double lowest = current.min_eigenvalue();
            ++diag.positivity_checks;
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, lowest);
            if (lowest < limits.min_eigenvalue) {
                fail("positivity violated (min eigenvalue " + std::to_string(lowest) + ")", tau_now);
            }
            break;
        }
    }

    diag.accepted_steps = ode.accepted_steps();
    diag.rejected_steps = ode.rejected_steps();
    diag.rhs_evaluations = ode.rhs_evaluations();
    return series;
}

// ---------------------------------------------------------------------------
// Dense full-space oracle

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Embeds a single-qubit operator on qubit j and a photon operator into the
/// full space; qubit n-1 is the most significant factor, the photon the least.
Eigen::MatrixXcd site_operator(int n_qubits, int j, const Eigen::MatrixXcd& qubit_op,
                               const Eigen::MatrixXcd& photon_op) {
    Eigen::MatrixXcd out = photon_op;
    for (int q = 0; q < n_qubits; ++q) {
        out = kron(q == j ? qubit_op : Eigen::MatrixXcd::Identity(2, 2), out);
    }
    return out;
}

}  // namespace

DenseModel::DenseModel(SystemParams params, int photon_cutoff)
    : params_(std::move(params)), cutoff_(photon_cutoff) {
    if (params_.n_qubits < 1 || params_.n_qubits > kMaxQubits) {
        throw std::invalid_argument("DenseModel: n_qubits must be in [1, 4]");
    }
    if (photon_cutoff < 0 || photon_cutoff > kMaxCutoff) {
        throw std::invalid_argument("DenseModel: photon cutoff must be in [0, 5]");
    }
    if (params_.epsilons.size() != static_cast<std::size_t>(params_.n_qubits)) {
        throw std::invalid_argument("DenseModel: one epsilon per qubit required");
    }
    const int nq = params_.n_qubits;
    const int np = cutoff_ + 1;
    dim_ = (1 << nq) * np;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(np, np);
    for (int p = 1; p < np; ++p) {
        a(p - 1, p) = std::sqrt(static_cast<double>(p));
    }
    Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(2, 2);  // |g><e|, index 0 = ground
    lower(0, 1) = 1.0;
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    z(0, 0) = -1.0;
    z(1, 1) = 1.0;
    const Eigen::MatrixXcd id_ph = Eigen::MatrixXcd::Identity(np, np);

    a_ = site_operator(nq, -1, Eigen::MatrixXcd::Identity(2, 2), a);
    n_ph_ = a_.adjoint() * a_;
    n_q_ = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int j = 0; j < nq; ++j) {
        sm_.push_back(site_operator(nq, j, lower, id_ph));
        sz_.push_back(site_operator(nq, j, z, id_ph));
        n_q_ += sm_.back().adjoint() * sm_.back();
    }

    const double frame = params_.lab_frame ? 0.0 : params_.omega;
    h_ = (params_.omega - frame) * n_ph_;
    for (int j = 0; j < nq; ++j) {
        const auto& s = sm_[static_cast<std::size_t>(j)];
        h_ += (params_.epsilons[static_cast<std::size_t>(j)] - frame) * (s.adjoint() * s);
        h_ += params_.g * (a_.adjoint() * s + a_ * s.adjoint());
    }

    loss_ = Eigen::MatrixXcd::Zero(dim_, dim_);
    auto add_jump = [&](const Eigen::MatrixXcd& l, double rate) {
        if (rate > 0.0) {
            jumps_.push_back(std::sqrt(rate) * l);
            loss_ += rate * (l.adjoint() * l);
        }
    };
    add_jump(a_, params_.kappa);
    for (const auto& s : sm_) {
        add_jump(s, params_.gamma);
    }
}

Eigen::MatrixXcd DenseModel::apply_liouvillian(const Eigen::MatrixXcd& rho) const {
    const cplx minus_i(0.0, -1.0);
    Eigen::MatrixXcd d = minus_i * (h_ * rho - rho * h_);
    d -= 0.5 * (loss_ * rho + rho * loss_);
    for (const auto& l : jumps_) {
        d += l * rho * l.adjoint();
    }
    if (params_.gamma_phi > 0.0) {
        for (const auto& z : sz_) {
            d += params_.gamma_phi * (z * rho * z - rho);
        }
    }
    return d;
}

Eigen::MatrixXcd DenseModel::embed(const BlockDensityMatrix& rho) const {
    if (rho.n_qubits() != params_.n_qubits) {
        throw StructuralError("DenseModel::embed: qubit count mismatch");
    }
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int n = 0; n <= rho.max_sector(); ++n) {
        const SectorBasis basis(rho.n_qubits(), n);
        const auto b = rho.block(n);
        std::vector<int> idx(basis.dim());
        for (std::size_t i = 0; i < basis.dim(); ++i) {
            if (basis[i].photons > cutoff_) {
                if (b.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() > 0.0) {
                    throw StructuralError("DenseModel::embed: state exceeds the photon cutoff");
                }
                idx[i] = -1;
                continue;
            }
            idx[i] = index(basis[i].mask, basis[i].photons);
        }
        for (std::size_t i = 0; i < basis.dim(); ++i) {
            for (std::size_t k = 0; k < basis.dim(); ++k) {
                if (idx[i] >= 0 && idx[k] >= 0) {
                    full(idx[i], idx[k]) = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
                }
            }
        }
    }
    return full;
}

DenseTrajectory dense_oracle_evolve(const DenseModel& model, const Eigen::MatrixXcd& rho0,
                                    const IntegratorConfig& config,
                                    std::span<const double> sample_grid, bool keep_states) {
    config.validate();
    check_runnable(model.params());
    const Eigen::Index d = model.dim();
    if (rho0.rows() != d || rho0.cols() != d) {
        throw StructuralError("dense_oracle_evolve: initial state has the wrong size");
    }
    const std::vector<double> grid = effective_grid(sample_grid, config);
    const double t_per_tau = 1.0 / model.params().purcell_rate();
    const double tau_end = std::min(config.tau_max, grid.back());
    const double t_end = tau_end * t_per_tau;
    const auto n = static_cast<std::size_t>(d * d);

    Eigen::MatrixXcd in(d, d);
    DormandPrince45 ode(
        n,
        [&](std::span<const cplx> y, std::span<cplx> dy) {
            std::copy(y.begin(), y.end(), in.data());
            const Eigen::MatrixXcd out = model.apply_liouvillian(in);
            std::copy(out.data(), out.data() + n, dy.begin());
        },
        ode_options(config, t_per_tau));

    DenseTrajectory traj;
    Eigen::MatrixXcd rho(d, d);
    auto record = [&](double tau, std::span<const cplx> y) {
        std::copy(y.begin(), y.end(), rho.data());
        traj.tau.push_back(tau);
        traj.n_ph.push_back((model.photon_number() * rho).trace().real());
        traj.n_q.push_back((model.qubit_number() * rho).trace().real());
        if (keep_states) {
            traj.states.push_back(rho);
        }
    };

    std::vector<cplx> y0(rho0.data(), rho0.data() + n);
    ode.reset(0.0, y0);
    std::vector<cplx> sample(n);
    std::size_t next = 0;
    while (next < grid.size() && grid[next] <= 0.0) {
        record(grid[next++], ode.y());
    }
    while (ode.t() < t_end && next < grid.size()) {
        ode.step(t_end);
        const double tau_prev = ode.t_previous() / t_per_tau;
        const double tau_now = ode.t() >= t_end ? tau_end : ode.t() / t_per_tau;
        while (next < grid.size() && grid[next] <= tau_now) {
            if (grid[next] >= tau_now) {
                record(grid[next], ode.y());
            } else {
                ode.dense_output(std::max(grid[next], tau_prev) * t_per_tau, sample);
                record(grid[next], sample);
            }
            ++next;
        }
    }
    return traj;
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw StructuralError("trace_distance: size mismatch");
    }
    const Eigen::MatrixXcd diff = a - b;
    const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace tcsim
