// Acceptance suite: runs every verification experiment at its stated
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ocstab/config.hpp"
#include "ocstab/verify.hpp"

using namespace ocstab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Harness {
    int failed = 0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void report(int num, const std::string& name, bool pass, const std::string& detail) {
        const double el =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d [%s] %-34s %s (t=%.1fs)\n", num, pass ? "PASS" : "FAIL",
                    name.c_str(), detail.c_str(), el);
        std::fflush(stdout);
        if (!pass) ++failed;
    }

    void run(int num, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        try {
            const auto [ok, detail] = body();
            report(num, name, ok, detail);
        } catch (const std::exception& ex) {
            report(num, name, false, std::string("exception: ") + ex.what());
        }
    }
};

std::string cfg_path(const std::string& name) {
    return std::string(OCSTAB_SOURCE_DIR) + "/configs/" + name;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double headline(const RunSummary& s, const std::string& key) {
    for (const auto& [k, v] : s.headline)
        if (k == key) return v;
    throw std::runtime_error("missing headline " + key);
}

// ---- criterion 1 ----
std::pair<bool, std::string> state_solver_order() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> orders;

    auto study = [&](int dim) {
        std::vector<double> errs;
        for (int n : {16, 32, 64}) {
            const GridDomain d = dim == 1 ? make_grid(0.0, 1.0, n)
                                          : make_grid(2, {{0, 1}, {0, 1}}, {n, n});
            const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
            const GridField exact = sample(d, [&](double x, double y) {
                return dim == 1 ? std::sin(kPi * x) : std::sin(kPi * x) * std::sin(kPi * y);
            });
            const double lap = dim == 1 ? kPi * kPi : 2.0 * kPi * kPi;
            GridField rhs(d);
            for (int i = 0; i < rhs.size(); ++i)
                rhs[i] = lap * exact[i] + exact[i] * exact[i] * exact[i];
            const StateSolveReport rep = solve_state(op, Nonlinearity::cubic(), rhs);
            if (!rep.converged) throw std::runtime_error("state solve failed in the order study");
            errs.push_back(norm(rep.y - exact, NormKind::Linf));
        }
        for (size_t k = 1; k < errs.size(); ++k) orders.push_back(std::log2(errs[k - 1] / errs[k]));
    };
    study(1);
    study(2);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = wall < 30.0;
    double omin = 1e9, omax = -1e9;
    for (double o : orders) {
        ok = ok && o >= 1.8 && o <= 2.2;
        omin = std::min(omin, o);
        omax = std::max(omax, o);
    }
    return {ok, fmt("orders in [%.3f, %.3f], %.1fs", omin, omax, wall)};
}

// ---- criterion 2 ----
std::pair<bool, std::string> adjoint_gradient_exactness() {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 1}}, {33, 33});
    const GridField y_d =
        sample(d, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    auto inst = make_instance(d, std::move(op), Nonlinearity::cubic(),
                              CostIntegrand::tracking(y_d), GridField(d, 0.1),
                              GridField(d, -3.0), GridField(d, 3.0));
    Rng rng(2026);
    GridField u(d);
    for (int i = 0; i < u.size(); ++i) u[i] = rng.uniform(-1.0, 1.0);
    const PerturbationE e0 = zero_perturbation(d);
    const GridField g = gradient_u(inst, u, e0);

    double worst_grad = 0.0;
    for (int r = 0; r < 5; ++r) {
        GridField v(d);
        for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
        v *= 1.0 / norm(v, NormKind::L2);
        const double t = 1e-4;
        const double fd = (evaluate_cost(inst, axpy(u, t, v), e0).value -
                           evaluate_cost(inst, axpy(u, -t, v), e0).value) /
                          (2 * t);
        const double pred = inner(g, v);
        worst_grad = std::max(worst_grad, std::abs(fd - pred) / (1.0 + std::abs(pred)));
    }

    GridField v(d);
    for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
    v *= 1.0 / norm(v, NormKind::L2);
    const double t = 1e-3;
    const double c0 = evaluate_cost(inst, u, e0).value;
    const double cp = evaluate_cost(inst, axpy(u, t, v), e0).value;
    const double cm = evaluate_cost(inst, axpy(u, -t, v), e0).value;
    const double fd2 = (cp - 2 * c0 + cm) / (t * t);
    const double form = hessian_form(inst, u, e0, v, v);
    const double hess_err = std::abs(fd2 - form) / (1.0 + std::abs(form));

    const bool ok = worst_grad <= 1e-6 && hess_err <= 1e-4;
    return {ok, fmt("grad rel err %.2e (<=1e-6), hessian rel err %.2e (<=1e-4)", worst_grad,
                    hess_err)};
}

// ---- criteria 3 and 4 share the FD machinery through run() ----
std::pair<bool, std::string> fd_check_with_config(const std::string& config,
                                                  const std::string& out,
                                                  double* max_err = nullptr) {
    RunConfig cfg = parse_config(cfg_path(config));
    cfg.out_dir = out;
    const RunSummary s = run("fd-check", cfg);
    double worst = 0.0;
    for (const auto& [k, v] : s.headline)
        if (k.rfind("error_", 0) == 0) worst = std::max(worst, v);
    if (max_err) *max_err = worst;
    return {s.pass, fmt("%zu directions, worst smallest-step error %.2e", s.criteria.size(),
                        worst)};
}

std::pair<bool, std::string> bangbang_fd_and_identity() {
    RunConfig cfg = parse_config(cfg_path("bangbang_linear.cfg"));
    const SolutionRecord rec = auto_solve(cfg.instance, cfg.base, nullptr, cfg.solver);
    if (!rec.converged) return {false, "bang-bang solve did not converge"};
    const SubgradientE s = bangbang_subgradient(cfg.instance, rec);
    const double id_tol = 1e-8 * norm(rec.phi, NormKind::Linf);
    const bool id_ok = s.certificate.sum_identity_gap <= id_tol;

    cfg.out_dir = "acceptance_out/c4_fd";
    const RunSummary sum = run("fd-check", cfg);
    double worst = 0.0;
    for (const auto& [k, v] : sum.headline)
        if (k.rfind("error_", 0) == 0) worst = std::max(worst, v);

    return {id_ok && sum.pass,
            fmt("sum identity gap %.2e (<=%.2e), worst FD error %.2e",
                s.certificate.sum_identity_gap, id_tol, worst)};
}

// ---- criterion 5 ----
std::pair<bool, std::string> measure_estimator() {
    RunConfig lin = parse_config(cfg_path("bangbang_linear.cfg"));
    lin.out_dir = "acceptance_out/c5_linear";
    const RunSummary slin = run("measure-fit", lin);

    RunConfig cub = parse_config(cfg_path("bangbang_cubicphi.cfg"));
    cub.out_dir = "acceptance_out/c5_cubic";
    const RunSummary scub = run("measure-fit", cub);

    return {slin.pass && scub.pass,
            fmt("linear kappa=%.3f K=%.3f; cubic kappa=%.3f", headline(slin, "kappa_hat"),
                headline(slin, "K_hat"), headline(scub, "kappa_hat"))};
}

// ---- criterion 6 ----
std::pair<bool, std::string> growth_condition() {
    RunConfig cfg = parse_config(cfg_path("bangbang_linear.cfg"));
    cfg.out_dir = "acceptance_out/c6_growth";
    const RunSummary s = run("growth-check", cfg);
    return {s.pass && headline(s, "violations") == 0.0,
            fmt("%d samples, min ratio %.3e, %d violations",
                static_cast<int>(headline(s, "samples")), headline(s, "min_ratio"),
                static_cast<int>(headline(s, "violations")))};
}

// ---- criterion 7 ----
std::pair<bool, std::string> ssc_checks() {
    RunConfig lin = parse_config(cfg_path("bangbang_linear.cfg"));
    const SolutionRecord rec = auto_solve(lin.instance, lin.base, nullptr, lin.solver);
    if (!rec.converged) return {false, "linear instance solve did not converge"};
    const double tau = lin.ssc_tau_rel * norm(rec.phi, NormKind::Linf);
    const SscReport rep = check_ssc(lin.instance, rec, tau, 0.0, lin.ssc_samples, lin.seed);
    const bool exact_ok = rep.samples >= 500 && std::abs(rep.delta_hat - 1.0) <= 1e-9;

    RunConfig cub = parse_config(cfg_path("ssc_cubic_small.cfg"));
    cub.out_dir = "acceptance_out/c7_ssc";
    const RunSummary s = run("ssc-check", cub);
    const double delta = headline(s, "delta_hat");
    const double oracle = headline(s, "eigen_oracle");
    const bool cubic_ok = s.pass && delta > 0.0 && std::abs(delta - oracle) <= 0.10 * oracle;

    return {exact_ok && cubic_ok,
            fmt("linear delta=1%+.1e over %d samples; cubic delta=%.4f vs oracle %.4f",
                rep.delta_hat - 1.0, rep.samples, delta, oracle)};
}

// ---- criterion 8 ----
std::pair<bool, std::string> holder_stability() {
    RunConfig cfg = parse_config(cfg_path("holder.cfg"));
    cfg.out_dir = "acceptance_out/c8_holder";
    const auto start = std::chrono::steady_clock::now();
    const RunSummary s = run("holder-sweep", cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {s.pass && wall < 300.0,
            fmt("exponent %.3f (>=0.85), R^2 %.4f (>=0.98), %.1fs", headline(s, "exponent"),
                headline(s, "r_squared"), wall)};
}

// ---- criterion 9 ----
std::pair<bool, std::string> coderivative_equivalence() {
    RunConfig cfg = parse_config(cfg_path("coderivative.cfg"));
    cfg.out_dir = "acceptance_out/c9_coderivative";
    const RunSummary s = run("coderivative-check", cfg);
    return {s.pass, fmt("%d candidates, %d disagreements",
                        static_cast<int>(headline(s, "candidates")),
                        static_cast<int>(headline(s, "disagreements")))};
}

// ---- criterion 10 ----
std::pair<bool, std::string> marginal_monotonicity() {
    RunConfig cfg = parse_config(cfg_path("sec3_fd.cfg"));
    const ProblemInstance& inst = cfg.instance;
    SolutionRecord prev = solve_control_problem(inst, cfg.base, nullptr, cfg.solver);
    if (!prev.converged) return {false, "base solve did not converge"};
    double worst_increase = 0.0;
    int steps = 0;
    for (int k = 1; k <= 20; ++k) {
        PerturbationE e = zero_perturbation(inst.domain);
        e.ealpha = GridField(inst.domain, -0.02 * k);
        e.ebeta = GridField(inst.domain, 0.02 * k);
        const SolutionRecord rec = solve_control_problem(inst, e, &prev.control, cfg.solver);
        if (!rec.converged) return {false, "ladder solve did not converge"};
        worst_increase = std::max(worst_increase, rec.value - prev.value);
        prev = rec;
        ++steps;
    }
    return {worst_increase <= 1e-9,
            fmt("%d nested relaxations, worst consecutive increase %.2e", steps, worst_increase)};
}

// ---- criterion 11 ----
std::pair<bool, std::string> determinism() {
    const std::vector<std::pair<std::string, std::string>> jobs = {
        {"solve", "sec3_fd.cfg"},
        {"measure-fit", "bangbang_linear.cfg"},
        {"growth-check", "bangbang_linear.cfg"},
    };
    int compared = 0;
    for (const auto& [command, config] : jobs) {
        RunConfig a = parse_config(cfg_path(config));
        a.out_dir = "acceptance_out/c11_a_" + command;
        run(command, a);
        RunConfig b = parse_config(cfg_path(config));
        b.out_dir = "acceptance_out/c11_b_" + command;
        run(command, b);
        for (const auto& entry : fs::directory_iterator(a.out_dir)) {
            if (entry.path().extension() != ".csv") continue;
            const std::string other = b.out_dir + "/" + entry.path().filename().string();
            if (slurp(entry.path().string()) != slurp(other))
                return {false, "CSV mismatch for " + command + ": " +
                                   entry.path().filename().string()};
            ++compared;
        }
    }
    return {true, fmt("%d CSV files byte-identical across repeated runs", compared)};
}

}  // namespace

int main() {
    Harness h;
    h.run(1, "state-solver order", state_solver_order);
    h.run(2, "adjoint-gradient exactness", adjoint_gradient_exactness);
    h.run(3, "subgradient vs marginal FD", [] {
        return fd_check_with_config("sec3_fd.cfg", "acceptance_out/c3_fd");
    });
    h.run(4, "bang-bang subgradient", bangbang_fd_and_identity);
    h.run(5, "level-set measure estimator", measure_estimator);
    h.run(6, "growth condition", growth_condition);
    h.run(7, "second-order condition sampling", ssc_checks);
    h.run(8, "Hoelder stability fit", holder_stability);
    h.run(9, "coderivative brute-force equivalence", coderivative_equivalence);
    h.run(10, "marginal monotonicity", marginal_monotonicity);
    h.run(11, "CSV determinism", determinism);

    std::printf("acceptance: %d/11 criteria passed\n", 11 - h.failed);
    return h.failed;
}
