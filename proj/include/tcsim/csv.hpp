#pragma once

// Locale-independent CSV output. Numbers use 12 significant digits via
// std::to_chars; rows end in a bare LF.

#include "tcsim/experiments.hpp"
#include "tcsim/observables.hpp"

#include <ostream>
#include <string>
#include <string_view>

namespace tcsim::csv {

inline constexpr std::string_view kTrajectoryHeader = "tau,n_ph,n_q,rate_n_ph,rate_n_q";
inline constexpr std::string_view kSweepHeader =
    "family,n_qubits,n_excited,kappa_over_g,omega_spread,gamma,gamma_phi,seed,max_n_ph,"
    "max_rate_n_ph,max_emission_rate,per_excitation_emission,argmax_tau_n_ph,status";

std::string format_number(double value);

void write_trajectory(std::ostream& os, const ObservableSeries& series);
void write_sweep(std::ostream& os, const SweepResult& result);

}  // namespace tcsim::csv
