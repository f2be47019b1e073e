#pragma once

#include <charconv>
#include <cstdint>
#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/maps.hpp"
#include "horseshoe/potential.hpp"

namespace horseshoe {

/** \brief Tolerances every check is tested against (all overridable from the config file). */
struct Tolerances {
    double lambda = 1e-9;             // lower bound slack
    double pressure_constant = 1e-2;  // pressure identity, constant potential
    double pressure_general = 3e-2;   // pressure identity, nonconstant potential
    double entropy_estimators = 2e-2; // cylinder vs Birkhoff entropy
    double invariance = 1e-3;         // shift-invariance residual of mu
    double gibbs_max_over_min = 10.0;
    double gibbs_plateau = 1.5;
    double jacobian_sum = 1e-10;
    double chain_rule = 1e-12;
    double hn_relative = 5e-2;
    double lyapunov_seed_spread = 5e-2;
    double nonlacunary_tail = 0.1;
    double first_time_increment = 1e-3;
    double semiconjugacy = 1e-12;
    double lift_integral = 1e-6;
};

/** \brief Run configuration: flat `key = value` text with dotted sections; '#' starts a comment. */
struct Config {
    Parameters params;
    PotentialFamily family = PotentialFamily::constant;
    double potential_a = 0.0;
    double potential_b = 0.0;
    double potential_t = 0.0;
    double holder_C = -1.0;      // < 0: family default
    double holder_delta = 1.0;
    int depth = 15;
    int n_max = 12;
    bool n_max_set = false;  // when unset, n_max follows min(12, depth)
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output_dir = ".";
    int mc_samples = 100;        // Monte Carlo orbits
    int mc_length = 10000;       // steps per orbit
    int uniqueness_points = 1000;
    int nonlacunary_samples = 200;
    int nonlacunary_length = 500;
    int lift_n_max = 10;
    int render_generations = 3;
    bool sabotage_matrix = false;
    Tolerances tol;

    Potential potential() const {
        Potential phi = Potential::constant(0.0);
        switch (family) {
            case PotentialFamily::constant: phi = Potential::constant(potential_a); break;
            case PotentialFamily::affine_in_y: phi = Potential::affine_in_y(potential_a, potential_b); break;
            case PotentialFamily::center_log_derivative:
                phi = Potential::center_log_derivative(potential_t, params.sigma).shifted(potential_a);
                break;
        }
        if (holder_C >= 0.0) phi.set_holder(holder_C, holder_delta);
        return phi;
    }

    /** \brief Enforces parameter constraints and the variation gate. */
    void validate() const {
        params.validate();
        if (depth < 2) throw config_error("run.depth must be >= 2");
        if (n_max < 1 || n_max > depth) throw config_error("run.n_max must lie in [1, run.depth]");
        if (threads < 1) throw config_error("run.threads must be >= 1");
        if (mc_samples < 1 || mc_length < 1 || uniqueness_points < 1 || nonlacunary_samples < 1 || nonlacunary_length < 1)
            throw config_error("sample counts must be positive");
        if (lift_n_max < 0) throw config_error("lift.n_max must be >= 0");
        require_admissible(potential());
    }
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error("key '" + key + "': not a number: " + v);
    return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int x{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error("key '" + key + "': not an integer: " + v);
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("key '" + key + "': not a boolean: " + v);
}
}  // namespace detail

/** \brief Applies one key to the configuration; unknown keys are rejected. */
inline void set_config_key(Config& c, const std::string& key, const std::string& v) {
    using detail::to_bool;
    using detail::to_double;
    using detail::to_int;
    const std::map<std::string, double*> reals{
        {"parameters.rho", &c.params.rho},
        {"parameters.sigma", &c.params.sigma},
        {"parameters.beta", &c.params.beta},
        {"parameters.beta1", &c.params.beta1},
        {"potential.a", &c.potential_a},
        {"potential.b", &c.potential_b},
        {"potential.t", &c.potential_t},
        {"potential.holder_C", &c.holder_C},
        {"potential.holder_delta", &c.holder_delta},
        {"tolerances.lambda", &c.tol.lambda},
        {"tolerances.pressure_constant", &c.tol.pressure_constant},
        {"tolerances.pressure_general", &c.tol.pressure_general},
        {"tolerances.entropy_estimators", &c.tol.entropy_estimators},
        {"tolerances.invariance", &c.tol.invariance},
        {"tolerances.gibbs_max_over_min", &c.tol.gibbs_max_over_min},
        {"tolerances.gibbs_plateau", &c.tol.gibbs_plateau},
        {"tolerances.jacobian_sum", &c.tol.jacobian_sum},
        {"tolerances.chain_rule", &c.tol.chain_rule},
        {"tolerances.hn_relative", &c.tol.hn_relative},
        {"tolerances.lyapunov_seed_spread", &c.tol.lyapunov_seed_spread},
        {"tolerances.nonlacunary_tail", &c.tol.nonlacunary_tail},
        {"tolerances.first_time_increment", &c.tol.first_time_increment},
        {"tolerances.semiconjugacy", &c.tol.semiconjugacy},
        {"tolerances.lift_integral", &c.tol.lift_integral},
    };
    const std::map<std::string, int*> ints{
        {"run.depth", &c.depth},
        {"run.n_max", &c.n_max},
        {"samples.orbits", &c.mc_samples},
        {"samples.orbit_length", &c.mc_length},
        {"samples.uniqueness_points", &c.uniqueness_points},
        {"samples.nonlacunary_orbits", &c.nonlacunary_samples},
        {"samples.nonlacunary_length", &c.nonlacunary_length},
        {"lift.n_max", &c.lift_n_max},
        {"render.generations", &c.render_generations},
    };
    if (key == "run.n_max") c.n_max_set = true;
    if (auto it = reals.find(key); it != reals.end()) {
        *it->second = to_double(key, v);
    } else if (auto jt = ints.find(key); jt != ints.end()) {
        *jt->second = to_int<int>(key, v);
    } else if (key == "potential.family") {
        c.family = parse_family(v);
    } else if (key == "run.seed") {
        c.seed = to_int<std::uint64_t>(key, v);
    } else if (key == "run.threads") {
        c.threads = to_int<unsigned>(key, v);
    } else if (key == "run.output_dir") {
        c.output_dir = v;
    } else if (key == "debug.sabotage_matrix") {
        c.sabotage_matrix = to_bool(key, v);
    } else {
        throw config_error("unknown configuration key '" + key + "'");
    }
}

/** \brief Parses `key = value` lines into `c` (later keys override earlier ones). */
inline void parse_config(std::istream& in, Config& c) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw config_error("line " + std::to_string(lineno) + ": empty key or value");
        set_config_key(c, key, value);
    }
    if (!c.n_max_set) c.n_max = std::min(12, c.depth);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    Config c;
    parse_config(in, c);
    return c;
}

}  // namespace horseshoe
