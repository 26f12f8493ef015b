// tcsim: command-line driver.
//
//   tcsim simulate --config run.yaml [--out traj.csv] [--seed N]
//   tcsim sweep (--config sweep.yaml | --preset fig1) [--out sweep.csv] [--jobs N] [--seed N]
//   tcsim verify
//
// Exit status: 0 success, 1 usage or configuration error, 2 numerical failure.

#include "tcsim/config.hpp"
#include "tcsim/csv.hpp"
#include "tcsim/dynamics.hpp"
#include "tcsim/experiments.hpp"
#include "tcsim/simd/kernels.hpp"
#include "tcsim/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#ifndef TCSIM_VERSION
#define TCSIM_VERSION "unknown"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Options {
    std::string config_path;
    std::string preset;
    std::string out;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    double perturbation = 0.0;
};

tcsim::RunConfig load(const Options& opt) {
    return opt.config_path.empty() ? tcsim::RunConfig{} : tcsim::load_config_file(opt.config_path);
}

/// Writes through `fn` to `path`, or to stdout when path is empty.
template <typename F>
void write_output(const std::string& path, F&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw tcsim::ConfigError("cannot open output file '" + path + "'", 0);
    }
    fn(os);
    if (!os) {
        throw tcsim::ConfigError("failed writing '" + path + "'", 0);
    }
}

int run_simulate(const Options& opt) {
    tcsim::RunConfig cfg = load(opt);
    if (!cfg.simulate) {
        std::cerr << "error: config has no 'simulate' section\n";
        return kExitUsage;
    }
    if (opt.seed) {
        cfg.simulate->seed = *opt.seed;
    }
    const tcsim::SimulationPoint& point = *cfg.simulate;
    const tcsim::SystemParams params = point.params();
    const tcsim::BlockDensityMatrix rho0 = point.initial_state();
    const tcsim::LiouvillianCache cache(params, rho0.max_sector());

    tcsim::ObservableSeries series;
    try {
        series = tcsim::evolve(cache, rho0, cfg.integrator);
    } catch (const tcsim::IntegrationError& e) {
        std::cerr << "error: " << e.what() << " (last good tau " << e.last_good_time() << ")\n";
        return kExitNumerical;
    }
    const std::string path = opt.out.empty() ? cfg.output.path : opt.out;
    write_output(path, [&](std::ostream& os) { tcsim::csv::write_trajectory(os, series); });

    const auto& d = series.diagnostics;
    std::cerr << "simulate: " << series.size() << " samples, " << d.accepted_steps << " steps (" << d.rejected_steps
              << " rejected), trace drift " << d.max_trace_drift << ", min eigenvalue "
              << d.min_eigenvalue << ", kernels " << tcsim::simd::best_kernels().name << "\n";
    return kExitOk;
}

int run_sweep_cmd(const Options& opt) {
    tcsim::RunConfig cfg = load(opt);
    std::vector<tcsim::SweepSpec> specs = cfg.sweeps;
    if (!opt.preset.empty()) {
        try {
            specs = tcsim::preset(opt.preset);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    if (specs.empty() && opt.config_path.empty()) {
        std::cerr << "error: sweep needs --config or --preset\n";
        return kExitUsage;
    }
    if (opt.seed) {
        for (tcsim::SweepSpec& s : specs) {
            s.seeds = {*opt.seed};
        }
    }
    cfg.sweeps = specs;

    std::size_t total = 0;
    for (const tcsim::SweepSpec& s : specs) {
        total += tcsim::expand(s).size();
    }
    std::mutex log_mutex;
    std::atomic<std::size_t> done{0};
    tcsim::SweepOptions options;
    options.jobs = opt.jobs;
    options.integrator = cfg.integrator;
    options.on_point = [&](std::size_t, const tcsim::SweepRow& row) {
        const std::size_t n = ++done;
        const std::lock_guard lock(log_mutex);
        std::cerr << "[" << n << "/" << total << "] " << tcsim::to_string(row.point.family)
                  << " nq=" << row.point.n_qubits << " nex=" << row.point.n_excited
                  << " kappa/g=" << row.point.kappa_over_g
                  << (row.status == tcsim::RowStatus::ok ? "" : " FAILED: " + row.message) << "\n";
    };

    tcsim::SweepResult result = tcsim::run_sweep(specs, options);
    result.provenance.code_version = TCSIM_VERSION;
    result.provenance.config_hash = tcsim::config_hash(cfg);

    const std::string path = opt.out.empty() ? cfg.output.path : opt.out;
    write_output(path, [&](std::ostream& os) { tcsim::csv::write_sweep(os, result); });
    if (!path.empty()) {
        nlohmann::json meta = {
            {"code_version", result.provenance.code_version},
            {"config_hash", result.provenance.config_hash},
            {"started_utc", result.provenance.started_utc},
            {"finished_utc", result.provenance.finished_utc},
            {"rows", result.rows.size()},
            {"failed_rows", result.failures()},
            {"kernels", tcsim::simd::best_kernels().name},
            {"config", tcsim::serialize_config(cfg)},
        };
        write_output(path + ".provenance.json", [&](std::ostream& os) { os << meta.dump(2) << "\n"; });
    }
    if (!result.rows.empty() && result.failures() == result.rows.size()) {
        std::cerr << "error: every sweep point failed\n";
        return kExitNumerical;
    }
    if (result.failures() > 0) {
        std::cerr << "warning: " << result.failures() << " of " << result.rows.size()
                  << " points failed\n";
    }
    return kExitOk;
}

int run_verify(const Options& opt) {
    tcsim::VerifyOptions options;
    options.integrator = load(opt).integrator;
    options.hamiltonian_perturbation = opt.perturbation;
    const tcsim::VerifyReport report = tcsim::run_oracle_suite(options);
    report.print(std::cout);
    return report.all_passed() ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open Tavis-Cummings emission dynamics"};
    app.set_version_flag("--version", std::string(TCSIM_VERSION));
    app.require_subcommand(1);
    Options opt;

    auto* simulate = app.add_subcommand("simulate", "Evolve one initial state and write its trajectory");
    simulate->add_option("--config", opt.config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", opt.out, "Output CSV (default: output.path, else stdout)");
    simulate->add_option("--seed", opt.seed, "Override the disorder seed");

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write one row per point");
    sweep->add_option("--config", opt.config_path, "YAML run configuration")->check(CLI::ExistingFile);
    sweep->add_option("--preset", opt.preset, "Named preset")
        ->check(CLI::IsMember(tcsim::preset_names()));
    sweep->add_option("--out", opt.out, "Output CSV (default: output.path, else stdout)");
    sweep->add_option("--jobs", opt.jobs, "Worker threads (0: all cores)");
    sweep->add_option("--seed", opt.seed, "Override every disorder seed list");

    auto* verify = app.add_subcommand("verify", "Run the oracle checks");
    verify->add_option("--config", opt.config_path, "YAML file supplying integrator settings")
        ->check(CLI::ExistingFile);
    verify->add_option("--perturb-hamiltonian", opt.perturbation)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return run_simulate(opt);
        if (*sweep) return run_sweep_cmd(opt);
        if (*verify) return run_verify(opt);
    } catch (const tcsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tcsim::IntegrationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
