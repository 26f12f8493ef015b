#include "tcsim/experiments.hpp"

#include "tcsim/rng.hpp"
#include "tcsim/states.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace tcsim {

std::string_view to_string(StateFamily f) {
    return f == StateFamily::product ? "product" : "dicke";
}

StateFamily parse_family(std::string_view s) {
    if (s == "product") {
        return StateFamily::product;
    }
    if (s == "dicke") {
        return StateFamily::dicke;
    }
    throw std::invalid_argument("unknown state family '" + std::string(s) +
                                "' (expected product or dicke)");
}

std::vector<int> ExcitationRule::expand(int n_qubits) const {
    std::vector<int> out;
    switch (kind) {
        case Kind::all:
            for (int k = 1; k <= n_qubits; ++k) {
                out.push_back(k);
            }
            break;
        case Kind::half_up:
            out.push_back((n_qubits + 1) / 2);
            break;
        case Kind::list:
            for (int k : values) {
                if (k >= 1 && k <= n_qubits) {
                    out.push_back(k);
                }
            }
            break;
    }
    return out;
}

void SweepSpec::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("sweep: " + what); };
    for (int n : n_qubits) {
        if (n < 1 || n > 10) {
            fail("n_qubits must lie in [1, 10]");
        }
    }
    if (n_excited.kind == ExcitationRule::Kind::list) {
        const int largest = n_qubits.empty() ? 0 : *std::max_element(n_qubits.begin(), n_qubits.end());
        for (int k : n_excited.values) {
            if (k < 1) {
                fail("n_excited values must be >= 1");
            }
            if (!n_qubits.empty() && k > largest) {
                fail("n_excited = " + std::to_string(k) + " exceeds every n_qubits value");
            }
        }
    }
    for (double k : kappa_over_g) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            fail("kappa_over_g must be > 0");
        }
    }
    for (double s : omega_spread) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            fail("omega_spread must be >= 0");
        }
    }
    for (const auto* list : {&gamma, &gamma_phi}) {
        for (double r : *list) {
            if (!(r >= 0.0) || !std::isfinite(r)) {
                fail("relaxation rates must be >= 0");
            }
        }
    }
    if (!(g > 0.0)) {
        fail("g must be > 0");
    }
}

std::vector<SweepPoint> expand(const SweepSpec& spec) {
    spec.validate();
    std::vector<SweepPoint> points;
    for (StateFamily family : spec.families) {
        for (int nq : spec.n_qubits) {
            for (int nex : spec.n_excited.expand(nq)) {
                for (double kg : spec.kappa_over_g) {
                    const double purcell = spec.g / kg;  // g^2 / kappa
                    for (double spread : spec.omega_spread) {
                        const double abs_spread = spec.spread_units == RateUnits::purcell
                                                      ? spread * 2.0 * std::numbers::pi * purcell
                                                      : spread;
                        for (double gam : spec.gamma) {
                            for (double gphi : spec.gamma_phi) {
                                const double scale =
                                    spec.relaxation_units == RateUnits::purcell ? purcell : 1.0;
                                for (std::uint64_t seed : spec.seeds) {
                                    points.push_back({family, nq, nex, kg, abs_spread, gam * scale,
                                                      gphi * scale, seed, spec.g});
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return points;
}

std::vector<double> sample_disorder(double omega, double spread, int n_qubits, std::uint64_t seed) {
    if (!(spread >= 0.0)) {
        throw std::invalid_argument("sample_disorder: spread must be >= 0");
    }
    const CounterRng rng = CounterRng(seed).split(0xD150'8DE5ull);
    std::vector<double> eps(static_cast<std::size_t>(std::max(n_qubits, 0)), omega);
    if (spread == 0.0) {
        return eps;
    }
    for (int j = 0; j < n_qubits; ++j) {
        const double u = rng.uniform(static_cast<std::uint64_t>(j));
        eps[static_cast<std::size_t>(j)] = omega + spread * (u - 0.5);
    }
    return eps;
}

SystemParams params_for(const SweepPoint& point) {
    SystemParams p = SystemParams::homogeneous(point.n_qubits, point.kappa_over_g, point.g);
    p.gamma = point.gamma;
    p.gamma_phi = point.gamma_phi;
    p.epsilons = sample_disorder(p.omega, point.omega_spread, point.n_qubits, point.seed);
    return p;
}

SweepRow run_point(const SweepPoint& point, const IntegratorConfig& integrator) {
    SweepRow row{point, {}, RowStatus::ok, {}};
    try {
        const SystemParams params = params_for(point);
        params.validate();
        const LiouvillianCache cache(params, point.n_excited);
        const PureSectorState psi = point.family == StateFamily::dicke
                                        ? dicke_state(point.n_qubits, point.n_excited)
                                        : product_state(point.n_qubits, point.n_excited);
        const ObservableSeries series = evolve(cache, to_density(psi), integrator);
        row.metrics = extract_metrics(series, point.n_excited);
    } catch (const IntegrationError& e) {
        row.status = RowStatus::failed;
        row.message = e.what();
    } catch (const std::invalid_argument& e) {
        row.status = RowStatus::failed;
        row.message = e.what();
    }
    return row;
}

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == RowStatus::failed; }));
}

namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

SweepResult run_sweep(const std::vector<SweepSpec>& specs, const SweepOptions& options) {
    options.integrator.validate();
    std::vector<SweepPoint> points;
    for (const SweepSpec& spec : specs) {
        const auto expanded = expand(spec);
        points.insert(points.end(), expanded.begin(), expanded.end());
    }

    SweepResult result;
    result.provenance.started_utc = utc_now();
    result.rows.resize(points.size());

    unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(points.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) {
                return;
            }
            try {
                result.rows[i] = run_point(points[i], options.integrator);
                if (options.on_point) {
                    options.on_point(i, result.rows[i]);
                }
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(points.size());
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    result.provenance.finished_utc = utc_now();
    return result;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options) {
    return run_sweep(std::vector<SweepSpec>{spec}, options);
}

SuperradianceVerdict superradiance_indicator(const RunMetrics& metrics) {
    const double margin = metrics.per_excitation_emission - 1.0;
    return {margin > 0.0, margin};
}

PowerLawFit quadratic_scaling_fit(const std::vector<double>& n, const std::vector<double>& values) {
    if (n.size() != values.size()) {
        throw StructuralError("power-law fit: size mismatch");
    }
    if (n.size() < 3) {
        throw StructuralError("power-law fit needs at least 3 points");
    }
    const auto m = static_cast<double>(n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !(values[i] > 0.0)) {
            throw StructuralError("power-law fit needs positive data");
        }
        lx.push_back(std::log(n[i]));
        ly.push_back(std::log(values[i]));
        sx += lx.back();
        sy += ly.back();
        sxx += lx.back() * lx.back();
        sxy += lx.back() * ly.back();
    }
    const double denom = m * sxx - sx * sx;
    if (!(denom > 1e-12 * m * sxx)) {
        throw StructuralError("power-law fit: all abscissae equal");
    }
    PowerLawFit fit;
    fit.exponent = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / m;
    fit.prefactor = std::exp(intercept);
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / m;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        ss_res += r * r;
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.rms_log_residual = std::sqrt(ss_res / m);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

namespace {

std::vector<int> range(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) {
        v.push_back(i);
    }
    return v;
}

/// kappa/g from 0.25 to 32 in `per_octave` logarithmic steps per doubling.
std::vector<double> crossover_kappas(int per_octave) {
    std::vector<double> v;
    for (int i = -2 * per_octave; i <= 5 * per_octave; ++i) {
        v.push_back(std::exp2(static_cast<double>(i) / per_octave));
    }
    return v;
}

std::vector<SweepSpec> crossover_specs(int per_octave) {
    SweepSpec trapping;
    trapping.families = {StateFamily::product};
    trapping.n_qubits = range(1, 7);
    trapping.n_excited = ExcitationRule::list({1});
    trapping.kappa_over_g = crossover_kappas(per_octave);

    SweepSpec superradiant = trapping;
    superradiant.families = {StateFamily::dicke};
    superradiant.n_excited = ExcitationRule::half_up();
    return {trapping, superradiant};
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "crossover"}; }

std::vector<SweepSpec> preset(std::string_view name) {
    SweepSpec surface;
    surface.families = {StateFamily::product, StateFamily::dicke};
    surface.n_qubits = range(1, 7);
    surface.n_excited = ExcitationRule::all();
    surface.kappa_over_g = {1.0, 20.0};

    if (name == "fig1" || name == "fig3") {
        return {surface};
    }
    if (name == "fig2") {
        SweepSpec s;
        s.families = {StateFamily::dicke};
        s.n_qubits = range(1, 8);
        s.n_excited = ExcitationRule::all();
        s.kappa_over_g = {1.0, 2.0, 5.0, 10.0, 20.0};
        return {s};
    }
    if (name == "fig4") {
        return crossover_specs(2);
    }
    if (name == "crossover") {
        return crossover_specs(4);
    }
    if (name == "fig5") {
        SweepSpec s = surface;
        s.omega_spread = {0.3};
        s.seeds = {1};
        return {s};
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace tcsim
