#include <CLI11.hpp>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocstab/config.hpp"

namespace {

// Numeric knobs reachable from --tol-override.
bool apply_override(ocstab::RunConfig& cfg, const std::string& key, double value) {
    if (key == "solver.stationarity_tol") {
        cfg.solver.stationarity_tol = value;
        cfg.fd.solve.stationarity_tol = value;
    } else if (key == "solver.newton_tol") {
        cfg.instance.pde.newton_tol = value;
    } else if (key == "solver.linear_tol") {
        cfg.instance.pde.linear_rel_tol = value;
    } else if (key == "fd.tol_pass") {
        cfg.fd.tol_pass = value;
    } else if (key == "fd.solver_tol_factor") {
        cfg.fd.solver_tol_factor = value;
    } else if (key == "ssc.delta_target") {
        cfg.ssc_delta_target = value;
    } else if (key == "ssc.tau") {
        cfg.ssc_tau = value;
    } else if (key == "holder.min_exponent") {
        cfg.holder_min_exponent = value;
    } else if (key == "holder.min_r2") {
        cfg.holder_min_r2 = value;
    } else if (key == "coderivative.tol") {
        cfg.coderivative_tol = value;
    } else {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"box-constrained optimal control of semilinear elliptic PDEs: solvers, "
                 "marginal-function subgradients, and verification experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;
    std::vector<std::string> overrides;

    for (const auto& name : ocstab::command_list()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides experiment.out)");
        sub->add_option("--seed", seed, "random seed (overrides experiment.seed)");
        sub->add_option("--tol-override", overrides, "numeric override key=value");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        ocstab::RunConfig cfg = ocstab::parse_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) {
            cfg.seed = static_cast<uint64_t>(seed);
            cfg.solver.seed = cfg.seed;
            cfg.fd.solve.seed = cfg.seed;
        }
        for (const auto& ov : overrides) {
            const size_t eq = ov.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "bad --tol-override '%s': expected key=value\n", ov.c_str());
                return 2;
            }
            const std::string key = ov.substr(0, eq);
            double value = 0.0;
            try {
                value = std::stod(ov.substr(eq + 1));
            } catch (const std::exception&) {
                std::fprintf(stderr, "bad --tol-override value in '%s'\n", ov.c_str());
                return 2;
            }
            if (!apply_override(cfg, key, value)) {
                std::fprintf(stderr, "unknown --tol-override key '%s'\n", key.c_str());
                return 2;
            }
        }

        const ocstab::RunSummary summary = ocstab::run(command, cfg);
        int failed = 0;
        for (const auto& [name, ok] : summary.criteria) {
            std::printf("criterion %-40s %s\n", name.c_str(), ok ? "PASS" : "FAIL");
            if (!ok) ++failed;
        }
        std::printf("%s: %s (%d criteria, %d failed, %.2fs, out=%s)\n", command.c_str(),
                    summary.pass ? "PASS" : "FAIL", static_cast<int>(summary.criteria.size()),
                    failed, summary.wall_time_s, cfg.out_dir.c_str());
        return summary.pass ? 0 : failed;
    } catch (const ocstab::ConfigError& ex) {
        std::fprintf(stderr, "%s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 3;
    }
}
