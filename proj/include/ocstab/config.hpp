#ifndef OCSTAB_CONFIG_HPP
#define OCSTAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocstab/objective.hpp"
#include "ocstab/verify.hpp"

namespace ocstab {

/// All validation problems found in a config file, reported together.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

/// Parsed and validated run configuration. The problem instance and the
/// base perturbation are fully materialized; experiment sections keep
/// their knobs.
struct RunConfig {
    ProblemInstance instance;
    PerturbationE base;

    SolveOptions solver;
    uint64_t seed = 1;
    std::string out_dir = "out";

    // fd-check
    FDOracleConfig fd;
    std::vector<std::pair<std::string, PerturbationE>> fd_directions;

    // measure-fit
    std::vector<double> measure_epsilons;
    bool measure_on_adjoint = true;
    GridField measure_field;
    std::optional<double> measure_kappa_min, measure_kappa_max;
    std::optional<double> measure_K_min, measure_K_max;

    // growth-check
    int growth_samples = 1000;
    std::optional<double> growth_kappa;  // defaults to the measure fit

    // ssc-check
    double ssc_tau_rel = 0.5;  // tau = tau_rel * ||phi||_inf
    std::optional<double> ssc_tau;
    int ssc_samples = 500;
    double ssc_delta_target = 0.0;
    int ssc_refine = 80;
    double ssc_oracle_rel_tol = 0.10;

    // holder-sweep
    std::vector<double> holder_sizes;
    PerturbationE holder_family;
    double holder_min_exponent = 0.0;
    double holder_min_r2 = 0.0;
    std::optional<double> holder_kappa;

    // sweep-bounded
    std::vector<double> sweep_sizes;
    PerturbationE sweep_family;

    // coderivative-check
    int coderivative_candidates = 100;
    double coderivative_tol = 1e-6;
    double coderivative_margin = 0.1;
    int coderivative_oracle_samples = 200;

    std::string config_hash;  // FNV-1a over the canonicalized key/value pairs
};

/// Parses `section.key = value` lines with '#' comments. Collects every
/// validation error (unknown keys, malformed numbers, bad catalog names)
/// into a single ConfigError.
RunConfig parse_config(const std::string& path);

struct RunSummary {
    std::string command;
    std::string config_hash;
    uint64_t seed = 0;
    std::vector<std::pair<std::string, bool>> criteria;
    std::vector<std::pair<std::string, double>> headline;
    double wall_time_s = 0.0;
    bool pass = true;
};

/// Executes one CLI command; writes CSV artifacts and summary.txt under
/// out_dir and returns the summary. Throws on regime violations, naming
/// the offending keys.
RunSummary run(const std::string& command, RunConfig& cfg);

/// Known command list (for the CLI and error messages).
const std::vector<std::string>& command_list();

std::string version_string();

}  // namespace ocstab

#endif
