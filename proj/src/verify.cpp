#include "tcsim/verify.hpp"

#include "tcsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace tcsim {

bool VerifyReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

void VerifyReport::print(std::ostream& os) const {
    os << "integrator: rel_tol=" << integrator.rel_tol << " abs_tol=" << integrator.abs_tol
       << " tau_max=" << integrator.tau_max << " sample_dtau=" << integrator.sample_dtau << "\n";
    for (const VerifyCheck& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(44) << c.name
           << " observed=" << std::scientific << std::setprecision(3) << c.observed
           << " tolerance=" << c.tolerance << std::defaultfloat;
        if (!c.detail.empty()) {
            os << "  (" << c.detail << ")";
        }
        os << "\n";
    }
    os << (all_passed() ? "all oracle checks passed" : "oracle checks FAILED") << "\n";
}

double analytic_max_error(double kappa_over_g, const IntegratorConfig& config,
                          double hamiltonian_perturbation) {
    const SystemParams params = SystemParams::homogeneous(1, kappa_over_g);
    LiouvillianCache cache(params, 1);
    if (hamiltonian_perturbation != 0.0) {
        cache.perturb_hamiltonian(hamiltonian_perturbation);
    }
    IntegratorConfig cfg = config;
    cfg.early_stop_fraction = 0.0;
    const ObservableSeries s = evolve(cache, to_density(product_state(1, 1)), cfg);
    const double t_per_tau = 1.0 / params.purcell_rate();
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto exact = analytic::single_excitation(params.kappa, params.g, s.tau[i] * t_per_tau);
        worst = std::max({worst, std::abs(s.n_q[i] - exact.n_q), std::abs(s.n_ph[i] - exact.n_ph)});
    }
    return worst;
}

DenseComparison compare_block_with_dense(const SystemParams& params, const BlockDensityMatrix& rho0,
                                         const IntegratorConfig& config,
                                         const std::vector<double>& grid,
                                         double hamiltonian_perturbation) {
    LiouvillianCache cache(params, rho0.max_sector());
    if (hamiltonian_perturbation != 0.0) {
        cache.perturb_hamiltonian(hamiltonian_perturbation);
    }
    const DenseModel model(params, rho0.max_sector() + 2);

    IntegratorConfig cfg = config;
    cfg.early_stop_fraction = 0.0;
    std::vector<double> taus;
    std::vector<Eigen::MatrixXcd> block_states;
    const ObservableSeries series = evolve(cache, rho0, cfg, grid, [&](double tau, const BlockDensityMatrix& r) {
        taus.push_back(tau);
        block_states.push_back(model.embed(r));
    });
    (void)series;
    const DenseTrajectory dense = dense_oracle_evolve(model, model.embed(rho0), cfg, grid);

    if (dense.tau.size() != taus.size()) {
        throw StructuralError("compare_block_with_dense: sample grids differ");
    }
    DenseComparison out;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        out.max_trace_distance =
            std::max(out.max_trace_distance, trace_distance(block_states[i], dense.states[i]));
        const double nph = (model.photon_number() * block_states[i]).trace().real();
        const double nq = (model.qubit_number() * block_states[i]).trace().real();
        out.max_population_error = std::max(
            {out.max_population_error, std::abs(nph - dense.n_ph[i]), std::abs(nq - dense.n_q[i])});
    }
    return out;
}

double cutoff_sensitivity(const SystemParams& params, const BlockDensityMatrix& rho0, int extra,
                          const IntegratorConfig& config, const std::vector<double>& grid) {
    const DenseModel tight(params, rho0.max_sector());
    const DenseModel loose(params, rho0.max_sector() + extra);
    const DenseTrajectory a = dense_oracle_evolve(tight, tight.embed(rho0), config, grid, false);
    const DenseTrajectory b = dense_oracle_evolve(loose, loose.embed(rho0), config, grid, false);
    if (a.tau.size() != b.tau.size()) {
        throw StructuralError("cutoff_sensitivity: sample grids differ");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.tau.size(); ++i) {
        worst = std::max(worst, std::abs(a.n_ph[i] - b.n_ph[i]));
    }
    return worst;
}

namespace {

std::string fmt_kg(double kg) {
    std::ostringstream os;
    os << kg;
    return os.str();
}

}  // namespace

VerifyReport run_oracle_suite(const VerifyOptions& options) {
    VerifyReport report;
    report.integrator = options.integrator;
    const double eps = options.hamiltonian_perturbation;

    for (double kg : {0.5, 5.0, 20.0}) {
        const double err = analytic_max_error(kg, options.integrator, eps);
        report.checks.push_back({"analytic single excitation kappa/g=" + fmt_kg(kg), err, 1e-7,
                                 err < 1e-7, "max |n - n_exact| over tau in [0, tau_max]"});
    }

    SystemParams p = SystemParams::homogeneous(3, 5.0);
    p.gamma = 0.02 * p.g;
    p.gamma_phi = 0.01 * p.g;
    const std::vector<double> grid = uniform_grid(5.0, 0.05);
    for (const auto& [label, psi] :
         {std::pair{"dicke", dicke_state(3, 2)}, std::pair{"product", product_state(3, 2)}}) {
        const DenseComparison cmp =
            compare_block_with_dense(p, to_density(psi), options.integrator, grid, eps);
        report.checks.push_back({std::string("dense equivalence (3,2) ") + label,
                                 cmp.max_trace_distance, 1e-8, cmp.max_trace_distance < 1e-8,
                                 "max trace distance, tau in [0, 5]"});
    }

    const double sens = cutoff_sensitivity(p, to_density(dicke_state(3, 2)), 2, options.integrator, grid);
    report.checks.push_back({"photon cutoff N_ex -> N_ex+2", sens, 1e-12, sens < 1e-12,
                             "max |delta n_ph|, dense oracle"});
    return report;
}

}  // namespace tcsim
