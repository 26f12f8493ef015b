#include "tcsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tcsim {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

int line_of(const YAML::Node& node) {
    const YAML::Mark m = node.Mark();
    return m.is_null() ? 0 : m.line + 1;
}

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& what) {
    throw ConfigError(what, line_of(node));
}

/// A mapping node with a closed key set.
class Section {
public:
    Section(const YAML::Node& node, std::string name, std::initializer_list<const char*> keys)
        : node_(node), name_(std::move(name)) {
        if (!node.IsMap()) {
            fail_at(node, name_ + ": expected a mapping");
        }
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
                fail_at(kv.first, name_ + ": unknown key '" + key + "'");
            }
        }
    }

    bool has(const char* key) const { return static_cast<bool>(node_[key]); }
    YAML::Node at(const char* key) const { return node_[key]; }
    const YAML::Node& node() const { return node_; }
    const std::string& name() const { return name_; }

    template <typename T>
    void read(const char* key, T& out) const {
        const YAML::Node v = node_[key];
        if (!v) {
            return;
        }
        out = convert<T>(v, key);
    }

    template <typename T>
    void read_list(const char* key, std::vector<T>& out) const {
        const YAML::Node v = node_[key];
        if (!v) {
            return;
        }
        out = convert_list<T>(v, key);
    }

    template <typename T>
    T convert(const YAML::Node& v, const std::string& key) const {
        if (!v.IsScalar()) {
            fail_at(v, name_ + "." + key + ": expected a scalar");
        }
        try {
            return v.as<T>();
        } catch (const YAML::BadConversion&) {
            fail_at(v, name_ + "." + key + ": cannot parse '" + v.Scalar() + "'");
        }
    }

    template <typename T>
    std::vector<T> convert_list(const YAML::Node& v, const std::string& key) const {
        if (v.IsScalar()) {
            return {convert<T>(v, key)};
        }
        if (!v.IsSequence()) {
            fail_at(v, name_ + "." + key + ": expected a list");
        }
        std::vector<T> out;
        for (const auto& item : v) {
            out.push_back(convert<T>(item, key));
        }
        return out;
    }

private:
    YAML::Node node_;
    std::string name_;
};

template <typename F>
void validated(const YAML::Node& node, const std::string& section, F&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        fail_at(node, section + ": " + e.what());
    }
}

SimulationPoint::Family parse_point_family(const Section& s, const YAML::Node& v) {
    const auto name = s.convert<std::string>(v, "family");
    if (name == "product") return SimulationPoint::Family::product;
    if (name == "dicke") return SimulationPoint::Family::dicke;
    if (name == "vacuum") return SimulationPoint::Family::vacuum;
    fail_at(v, "simulate.family: expected product, dicke or vacuum, got '" + name + "'");
}

std::string_view to_string(SimulationPoint::Family f) {
    switch (f) {
        case SimulationPoint::Family::product: return "product";
        case SimulationPoint::Family::dicke: return "dicke";
        case SimulationPoint::Family::vacuum: return "vacuum";
    }
    return "?";
}

RateUnits parse_units(const Section& s, const char* key) {
    const auto name = s.convert<std::string>(s.at(key), key);
    if (name == "absolute") return RateUnits::absolute;
    if (name == "purcell") return RateUnits::purcell;
    fail_at(s.at(key), s.name() + "." + key + ": expected absolute or purcell, got '" + name + "'");
}

std::string_view to_string(RateUnits u) { return u == RateUnits::purcell ? "purcell" : "absolute"; }

SimulationPoint parse_simulate(const YAML::Node& node, int max_qubits) {
    const Section s(node, "simulate",
                    {"family", "n_qubits", "n_excited", "excited_mask", "g", "kappa_over_g", "gamma",
                     "gamma_phi", "epsilons", "omega_spread", "seed", "lab_frame"});
    SimulationPoint p;
    if (s.has("family")) {
        p.family = parse_point_family(s, s.at("family"));
    }
    s.read("n_qubits", p.n_qubits);
    s.read("n_excited", p.n_excited);
    if (s.has("excited_mask")) {
        p.excited_mask = s.convert<std::uint32_t>(s.at("excited_mask"), "excited_mask");
    }
    s.read("g", p.g);
    s.read("kappa_over_g", p.kappa_over_g);
    s.read("gamma", p.gamma);
    s.read("gamma_phi", p.gamma_phi);
    if (s.has("epsilons")) {
        p.epsilons = s.convert_list<double>(s.at("epsilons"), "epsilons");
    }
    s.read("omega_spread", p.omega_spread);
    s.read("seed", p.seed);
    s.read("lab_frame", p.lab_frame);

    validated(node, "simulate", [&] {
        if (p.family == SimulationPoint::Family::vacuum) {
            p.n_excited = 0;
        }
        if (p.excited_mask) {
            if (p.family != SimulationPoint::Family::product) {
                throw std::invalid_argument("excited_mask requires family: product");
            }
            if (p.n_qubits < 32 && (*p.excited_mask >> p.n_qubits) != 0) {
                throw std::invalid_argument("excited_mask has bits beyond n_qubits");
            }
            p.n_excited = std::popcount(*p.excited_mask);
        }
        if (!std::isfinite(p.omega_spread) || p.omega_spread < 0) {
            throw std::invalid_argument("omega_spread must be finite and >= 0");
        }
        p.params().validate(max_qubits);
        (void)p.initial_state();
    });
    return p;
}

ExcitationRule parse_rule(const Section& s) {
    const YAML::Node v = s.at("n_excited");
    if (v.IsScalar()) {
        const std::string word = v.Scalar();
        if (word == "all") return ExcitationRule::all();
        if (word == "half_up") return ExcitationRule::half_up();
    }
    return ExcitationRule::list(s.convert_list<int>(v, "n_excited"));
}

SweepSpec parse_sweep(const YAML::Node& node, std::size_t index) {
    const Section s(node, "sweeps[" + std::to_string(index) + "]",
                    {"families", "n_qubits", "n_excited", "kappa_over_g", "omega_spread",
                     "omega_spread_units", "seeds", "gamma", "gamma_phi", "relaxation_units", "g"});
    SweepSpec spec;
    if (s.has("families")) {
        spec.families.clear();
        const auto names = s.convert_list<std::string>(s.at("families"), "families");
        for (const auto& n : names) {
            validated(s.at("families"), s.name(), [&] { spec.families.push_back(parse_family(n)); });
        }
    }
    s.read_list("n_qubits", spec.n_qubits);
    if (s.has("n_excited")) {
        spec.n_excited = parse_rule(s);
    }
    s.read_list("kappa_over_g", spec.kappa_over_g);
    s.read_list("omega_spread", spec.omega_spread);
    if (s.has("omega_spread_units")) {
        spec.spread_units = parse_units(s, "omega_spread_units");
    }
    s.read_list("seeds", spec.seeds);
    s.read_list("gamma", spec.gamma);
    s.read_list("gamma_phi", spec.gamma_phi);
    if (s.has("relaxation_units")) {
        spec.relaxation_units = parse_units(s, "relaxation_units");
    }
    s.read("g", spec.g);
    validated(node, s.name(), [&] { spec.validate(); });
    return spec;
}

IntegratorConfig parse_integrator(const YAML::Node& node) {
    const Section s(node, "integrator",
                    {"rel_tol", "abs_tol", "initial_step", "max_step", "tau_max",
                     "early_stop_fraction", "sample_dtau"});
    IntegratorConfig c;
    s.read("rel_tol", c.rel_tol);
    s.read("abs_tol", c.abs_tol);
    s.read("initial_step", c.initial_step);
    s.read("max_step", c.max_step);
    s.read("tau_max", c.tau_max);
    s.read("early_stop_fraction", c.early_stop_fraction);
    s.read("sample_dtau", c.sample_dtau);
    validated(node, "integrator", [&] { c.validate(); });
    return c;
}

OutputSpec parse_output(const YAML::Node& node) {
    const Section s(node, "output", {"path", "format"});
    OutputSpec o;
    s.read("path", o.path);
    s.read("format", o.format);
    if (o.format != "csv") {
        fail_at(s.at("format"), "output.format: only csv is supported, got '" + o.format + "'");
    }
    return o;
}

RunConfig parse_root(const YAML::Node& root) {
    RunConfig cfg;
    if (!root || root.IsNull()) {
        return cfg;
    }
    const Section s(root, "config", {"simulate", "sweeps", "integrator", "output", "max_qubits"});
    s.read("max_qubits", cfg.max_qubits);
    if (cfg.max_qubits < 1 || cfg.max_qubits > 16) {
        fail_at(s.at("max_qubits"), "config.max_qubits must be in [1, 16]");
    }
    if (s.has("simulate")) {
        cfg.simulate = parse_simulate(s.at("simulate"), cfg.max_qubits);
    }
    if (s.has("sweeps")) {
        const YAML::Node list = s.at("sweeps");
        if (!list.IsSequence()) {
            fail_at(list, "sweeps: expected a list of sweep mappings");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            cfg.sweeps.push_back(parse_sweep(list[i], i));
        }
    }
    if (s.has("integrator")) {
        cfg.integrator = parse_integrator(s.at("integrator"));
    }
    if (s.has("output")) {
        cfg.output = parse_output(s.at("output"));
    }
    return cfg;
}

template <typename T>
void emit_list(YAML::Emitter& out, const char* key, const std::vector<T>& values) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const T& v : values) {
        out << v;
    }
    out << YAML::EndSeq;
}

}  // namespace

SystemParams SimulationPoint::params() const {
    SystemParams p = SystemParams::homogeneous(n_qubits, kappa_over_g, g);
    p.gamma = gamma;
    p.gamma_phi = gamma_phi;
    p.lab_frame = lab_frame;
    if (epsilons) {
        p.epsilons = *epsilons;
    } else if (n_qubits >= 1) {
        p.epsilons = sample_disorder(p.omega, omega_spread, n_qubits, seed);
    }
    return p;
}

BlockDensityMatrix SimulationPoint::initial_state() const {
    switch (family) {
        case Family::vacuum:
            return BlockDensityMatrix::vacuum(n_qubits, 0);
        case Family::product:
            return to_density(excited_mask ? product_state_from_mask(n_qubits, *excited_mask)
                                           : product_state(n_qubits, n_excited));
        case Family::dicke:
            return to_density(dicke_state(n_qubits, n_excited));
    }
    throw std::invalid_argument("unknown family");
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
    return parse_root(root);
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'", 0);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "max_qubits" << YAML::Value << config.max_qubits;
    if (config.simulate) {
        const SimulationPoint& p = *config.simulate;
        out << YAML::Key << "simulate" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "family" << YAML::Value << std::string(to_string(p.family));
        out << YAML::Key << "n_qubits" << YAML::Value << p.n_qubits;
        out << YAML::Key << "n_excited" << YAML::Value << p.n_excited;
        if (p.excited_mask) {
            out << YAML::Key << "excited_mask" << YAML::Value << *p.excited_mask;
        }
        out << YAML::Key << "g" << YAML::Value << p.g;
        out << YAML::Key << "kappa_over_g" << YAML::Value << p.kappa_over_g;
        out << YAML::Key << "gamma" << YAML::Value << p.gamma;
        out << YAML::Key << "gamma_phi" << YAML::Value << p.gamma_phi;
        if (p.epsilons) {
            emit_list(out, "epsilons", *p.epsilons);
        }
        out << YAML::Key << "omega_spread" << YAML::Value << p.omega_spread;
        out << YAML::Key << "seed" << YAML::Value << p.seed;
        out << YAML::Key << "lab_frame" << YAML::Value << p.lab_frame;
        out << YAML::EndMap;
    }
    out << YAML::Key << "sweeps" << YAML::Value << YAML::BeginSeq;
    for (const SweepSpec& s : config.sweeps) {
        out << YAML::BeginMap;
        std::vector<std::string> families;
        for (StateFamily f : s.families) {
            families.emplace_back(to_string(f));
        }
        emit_list(out, "families", families);
        emit_list(out, "n_qubits", s.n_qubits);
        out << YAML::Key << "n_excited" << YAML::Value;
        switch (s.n_excited.kind) {
            case ExcitationRule::Kind::all: out << "all"; break;
            case ExcitationRule::Kind::half_up: out << "half_up"; break;
            case ExcitationRule::Kind::list:
                out << YAML::Flow << YAML::BeginSeq;
                for (int v : s.n_excited.values) {
                    out << v;
                }
                out << YAML::EndSeq;
                break;
        }
        emit_list(out, "kappa_over_g", s.kappa_over_g);
        emit_list(out, "omega_spread", s.omega_spread);
        out << YAML::Key << "omega_spread_units" << YAML::Value << std::string(to_string(s.spread_units));
        emit_list(out, "seeds", s.seeds);
        emit_list(out, "gamma", s.gamma);
        emit_list(out, "gamma_phi", s.gamma_phi);
        out << YAML::Key << "relaxation_units" << YAML::Value << std::string(to_string(s.relaxation_units));
        out << YAML::Key << "g" << YAML::Value << s.g;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    const IntegratorConfig& c = config.integrator;
    out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rel_tol" << YAML::Value << c.rel_tol;
    out << YAML::Key << "abs_tol" << YAML::Value << c.abs_tol;
    out << YAML::Key << "initial_step" << YAML::Value << c.initial_step;
    out << YAML::Key << "max_step" << YAML::Value << c.max_step;
    out << YAML::Key << "tau_max" << YAML::Value << c.tau_max;
    out << YAML::Key << "early_stop_fraction" << YAML::Value << c.early_stop_fraction;
    out << YAML::Key << "sample_dtau" << YAML::Value << c.sample_dtau;
    out << YAML::EndMap;
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "path" << YAML::Value << config.output.path;
    out << YAML::Key << "format" << YAML::Value << config.output.format;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace tcsim
