#pragma once

// YAML run configuration for the command-line tool. Unknown keys are
// rejected and every error carries the 1-based line of the offending node.

#include "tcsim/dynamics.hpp"
#include "tcsim/experiments.hpp"
#include "tcsim/hilbert.hpp"
#include "tcsim/states.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcsim {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line);
    int line() const { return line_; }  // 0 when unknown

private:
    int line_;
};

/// One parameter point for `simulate`.
struct SimulationPoint {
    enum class Family { product, dicke, vacuum };
    Family family = Family::dicke;
    int n_qubits = 1;
    int n_excited = 1;
    std::optional<std::uint32_t> excited_mask;  // product family only
    double g = kDefaultCoupling;
    double kappa_over_g = 20.0;
    double gamma = 0.0;
    double gamma_phi = 0.0;
    std::optional<std::vector<double>> epsilons;  // overrides omega_spread
    double omega_spread = 0.0;
    std::uint64_t seed = 1;
    bool lab_frame = false;

    SystemParams params() const;
    BlockDensityMatrix initial_state() const;
};

struct OutputSpec {
    std::string path;  // empty: stdout
    std::string format = "csv";
};

struct RunConfig {
    std::optional<SimulationPoint> simulate;
    std::vector<SweepSpec> sweeps;
    IntegratorConfig integrator;
    OutputSpec output;
    int max_qubits = kDefaultMaxQubits;
};

RunConfig load_config_file(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Canonical YAML with every field spelled out; parse_config of the result
/// reproduces the same configuration.
std::string serialize_config(const RunConfig& config);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace tcsim
