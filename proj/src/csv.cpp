#include "tcsim/csv.hpp"

#include <charconv>
#include <cmath>

namespace tcsim::csv {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";  // folds -0
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

namespace {

std::string format_integer(std::uint64_t value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_trajectory(std::ostream& os, const ObservableSeries& series) {
    os << kTrajectoryHeader << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        os << format_number(series.tau[i]) << ',' << format_number(series.n_ph[i]) << ','
           << format_number(series.n_q[i]) << ',' << format_number(series.rate_n_ph[i]) << ','
           << format_number(series.rate_n_q[i]) << '\n';
    }
}

void write_sweep(std::ostream& os, const SweepResult& result) {
    os << kSweepHeader << '\n';
    for (const SweepRow& row : result.rows) {
        const SweepPoint& p = row.point;
        const bool ok = row.status == RowStatus::ok;
        const double nan = std::nan("");
        const RunMetrics& m = row.metrics;
        os << to_string(p.family) << ',' << format_integer(static_cast<std::uint64_t>(p.n_qubits)) << ','
           << format_integer(static_cast<std::uint64_t>(p.n_excited)) << ','
           << format_number(p.kappa_over_g) << ',' << format_number(p.omega_spread) << ','
           << format_number(p.gamma) << ',' << format_number(p.gamma_phi) << ','
           << format_integer(p.seed) << ',' << format_number(ok ? m.max_n_ph : nan) << ','
           << format_number(ok ? m.max_rate_n_ph : nan) << ','
           << format_number(ok ? m.max_emission_rate : nan) << ','
           << format_number(ok ? m.per_excitation_emission : nan) << ','
           << format_number(ok ? m.argmax_tau_n_ph : nan) << ',' << (ok ? "ok" : "failed") << '\n';
    }
}

}  // namespace tcsim::csv
