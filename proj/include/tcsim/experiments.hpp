#pragma once

#include "tcsim/dynamics.hpp"
#include "tcsim/hilbert.hpp"
#include "tcsim/observables.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcsim {

enum class StateFamily { product, dicke };

std::string_view to_string(StateFamily f);
StateFamily parse_family(std::string_view s);  // throws std::invalid_argument

/// Which excitation numbers to run for a given qubit count.
struct ExcitationRule {
    enum class Kind { list, all, half_up };
    Kind kind = Kind::all;
    std::vector<int> values;  // used by Kind::list

    static ExcitationRule all() { return {Kind::all, {}}; }
    static ExcitationRule half_up() { return {Kind::half_up, {}}; }
    static ExcitationRule list(std::vector<int> v) { return {Kind::list, std::move(v)}; }

    /// Values n with 1 <= n <= n_qubits, in ascending input order.
    std::vector<int> expand(int n_qubits) const;
};

/// Units for grid values that scale with the Purcell rate.
enum class RateUnits {
    absolute,   // omega = 1 units
    purcell,    // multiples of g^2 / kappa (relaxation) or 2 pi g^2 / kappa (spread)
};

/// A rectangular grid of parameter points. Ordering of the expanded points:
/// family, n_qubits, n_excited, kappa_over_g, omega_spread, gamma, gamma_phi, seed.
struct SweepSpec {
    std::vector<StateFamily> families{StateFamily::dicke};
    std::vector<int> n_qubits{1};
    ExcitationRule n_excited = ExcitationRule::all();
    std::vector<double> kappa_over_g{20.0};
    std::vector<double> omega_spread{0.0};
    RateUnits spread_units = RateUnits::absolute;
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> gamma{0.0};
    std::vector<double> gamma_phi{0.0};
    RateUnits relaxation_units = RateUnits::absolute;
    double g = kDefaultCoupling;

    /// Throws std::invalid_argument for n_qubits outside [1, 10], negative
    /// spreads or rates, non-positive kappa/g, or a listed excitation number
    /// larger than every n_qubits value. Listed values above a particular
    /// n_qubits are skipped for that qubit count.
    void validate() const;
};

struct SweepPoint {
    StateFamily family = StateFamily::dicke;
    int n_qubits = 1;
    int n_excited = 1;
    double kappa_over_g = 20.0;
    double omega_spread = 0.0;  // absolute
    double gamma = 0.0;         // absolute
    double gamma_phi = 0.0;     // absolute
    std::uint64_t seed = 1;
    double g = kDefaultCoupling;
};

std::vector<SweepPoint> expand(const SweepSpec& spec);

enum class RowStatus { ok, failed };

struct SweepRow {
    SweepPoint point;
    RunMetrics metrics;
    RowStatus status = RowStatus::ok;
    std::string message;
};

struct Provenance {
    std::string code_version;
    std::string config_hash;
    std::string started_utc;
    std::string finished_utc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    Provenance provenance;

    std::size_t failures() const;
};

struct SweepOptions {
    unsigned jobs = 0;  // 0: hardware concurrency
    IntegratorConfig integrator;
    /// Called once per finished point, from worker threads, in completion order.
    std::function<void(std::size_t index, const SweepRow& row)> on_point;
};

/// Qubit frequencies drawn uniformly on [omega - spread/2, omega + spread/2].
/// Draw j depends only on (seed, j), so prefixes agree across qubit counts.
std::vector<double> sample_disorder(double omega, double spread, int n_qubits, std::uint64_t seed);

SystemParams params_for(const SweepPoint& point);

/// Runs one point; integration failures come back as a failed row.
SweepRow run_point(const SweepPoint& point, const IntegratorConfig& integrator);

/// Evolves every expanded point of every spec. Rows come back in expansion
/// order regardless of which worker finished first.
SweepResult run_sweep(const std::vector<SweepSpec>& specs, const SweepOptions& options = {});
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

struct SuperradianceVerdict {
    bool superradiant = false;
    double margin = 0.0;  // per-excitation emission - 1
};

/// Superradiant iff the per-excitation emission rate exceeds the
/// independent-emitter value 1.
SuperradianceVerdict superradiance_indicator(const RunMetrics& metrics);

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double rms_log_residual = 0.0;
    double r_squared = 0.0;
};

/// Least squares on log(value) = log(c) + p log(n). Needs >= 3 points, all
/// positive; otherwise throws StructuralError.
PowerLawFit quadratic_scaling_fit(const std::vector<double>& n, const std::vector<double>& values);

/// Named presets reproducing the figure experiments: fig1..fig5, crossover.
std::vector<SweepSpec> preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace tcsim
