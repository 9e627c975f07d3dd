#ifndef NILFLOW_CONFIG_HPP
#define NILFLOW_CONFIG_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nilflow {

enum class ExperimentKind { Heights, Dc, Birkhoff, ReturnMap, Obstruction, Theta, LimitDist, Chi };

const char* kind_name(ExperimentKind k);
std::optional<ExperimentKind> kind_from_name(const std::string& name);

enum class AlphaPreset { Identity, Golden, Random, Matrix };

struct ObservableTermSpec {
    std::vector<int> m;
    int n = 0;
    double re = 0.0;
    double im = 0.0;
    bool operator==(const ObservableTermSpec&) const = default;
};

// Fully validated experiment description; one-to-one with the config text.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Chi;
    int g = 1;
    int d = 1;
    double big_k = 2.0;

    AlphaPreset alpha_preset = AlphaPreset::Identity;
    std::uint64_t alpha_seed = 0;
    std::vector<double> alpha_matrix;  // row-major 2g x 2g when preset == Matrix

    // kind-specific parameters (documented defaults applied on parse)
    double t_max = 15.0;
    int samples = 0;
    int depth = 8;
    double cutoff = 20.0;
    double step = 0.05;
    std::vector<double> sides;       // T for birkhoff / l2 profiles
    std::vector<double> t0;          // first entry of the T sequence
    double ratio = 3.1622776601683795;  // 10^(1/2)
    int count = 4;
    long long big_n = 100;
    std::vector<double> q;  // row-major g x g
    std::vector<double> l;  // length g
    std::vector<int> seed_m;
    int seed_n = 1;
    int truncation = 8;
    double rel_tol = 1e-8;
    double u_max = 10.0;
    std::vector<ObservableTermSpec> observable;
    std::uint64_t seed = 0;

    std::string out_dir = "out";
    std::string prefix;  // defaults to the kind name

    bool operator==(const ExperimentConfig&) const = default;

    // Canonical config text; reparses to an equal ExperimentConfig.
    std::string to_text() const;
};

struct ParseError {
    int line = 0;  // 0 when no single line is at fault
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ParseError> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

// Total: never throws on malformed text.
ParseResult parse_config(const std::string& text);

}  // namespace nilflow

#endif
