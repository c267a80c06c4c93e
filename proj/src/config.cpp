#include "ocstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ocstab/catalog.hpp"

namespace ocstab {

namespace {

std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string join_errors(const std::vector<std::string>& errs) {
    std::string out = "configuration invalid (" + std::to_string(errs.size()) + " error(s)):";
    for (const auto& e : errs) out += "\n  - " + e;
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "problem.dim", "problem.extent", "problem.n", "problem.operator",
        "problem.nonlinearity", "problem.integrand", "problem.target", "problem.target_mode",
        "problem.adjoint_shape", "problem.zeta", "problem.alpha", "problem.beta", "problem.Q",
        "problem.norm_mode", "problem.p0",
        "perturb.eJ", "perturb.ey", "perturb.ealpha", "perturb.ebeta",
        "solver.stationarity_tol", "solver.max_iterations", "solver.newton_tol",
        "solver.linear_tol", "solver.multistart", "solver.switching_tol_rel",
        "experiment.seed", "experiment.out",
        "fd.steps", "fd.tol_pass", "fd.solver_tol_factor",
        "fd.dir_eJ", "fd.dir_ey", "fd.dir_ealpha", "fd.dir_ebeta",
        "fd.mixed1_eJ", "fd.mixed1_ey", "fd.mixed1_ealpha", "fd.mixed1_ebeta",
        "fd.mixed2_eJ", "fd.mixed2_ey", "fd.mixed2_ealpha", "fd.mixed2_ebeta",
        "measure.epsilons", "measure.source", "measure.field",
        "measure.kappa_min", "measure.kappa_max", "measure.K_min", "measure.K_max",
        "growth.samples", "growth.kappa",
        "ssc.tau", "ssc.tau_rel", "ssc.samples", "ssc.delta_target", "ssc.refine",
        "ssc.oracle_rel_tol",
        "holder.sizes", "holder.family_eJ", "holder.family_ey", "holder.family_ealpha",
        "holder.family_ebeta", "holder.min_exponent", "holder.min_r2", "holder.kappa",
        "sweep.sizes", "sweep.family_eJ", "sweep.family_ey", "sweep.family_ealpha",
        "sweep.family_ebeta",
        "coderivative.candidates", "coderivative.tol", "coderivative.margin",
        "coderivative.oracle_samples",
    };
    return keys;
}

struct Raw {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errors;

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    std::string name(const std::string& k, const std::string& dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }

    double number(const std::string& k, double dflt) {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            errors.push_back(k + ": malformed number '" + it->second + "'");
            return dflt;
        }
    }

    int integer(const std::string& k, int dflt) {
        const double v = number(k, dflt);
        if (v != std::floor(v)) {
            errors.push_back(k + ": expected an integer");
            return dflt;
        }
        return static_cast<int>(v);
    }

    bool boolean(const std::string& k, bool dflt) {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        errors.push_back(k + ": expected true or false, got '" + it->second + "'");
        return dflt;
    }

    std::vector<double> list(const std::string& k, std::vector<double> dflt) {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        std::string t = strip(it->second);
        if (t.empty() || t.front() != '[') {
            // bare single number
            try {
                size_t pos = 0;
                const double v = std::stod(t, &pos);
                if (pos != t.size()) throw std::invalid_argument("");
                return {v};
            } catch (const std::exception&) {
                errors.push_back(k + ": expected a number or bracketed list, got '" + t + "'");
                return dflt;
            }
        }
        if (t.size() < 2 || t.back() != ']') {
            errors.push_back(k + ": expected a bracketed list, got '" + t + "'");
            return dflt;
        }
        t = t.substr(1, t.size() - 2);
        std::vector<double> out;
        std::string cur;
        for (char ch : t + ",") {
            if (ch == ',') {
                const std::string v = strip(cur);
                if (!v.empty()) {
                    try {
                        size_t pos = 0;
                        out.push_back(std::stod(v, &pos));
                        if (pos != v.size()) throw std::invalid_argument("");
                    } catch (const std::exception&) {
                        errors.push_back(k + ": malformed number '" + v + "' in list");
                    }
                }
                cur.clear();
            } else {
                cur += ch;
            }
        }
        return out;
    }

    GridField field(const std::string& k, const std::string& dflt_expr, const GridDomain& d) {
        const std::string expr = name(k, dflt_expr);
        try {
            return parse_field(expr, d);
        } catch (const std::exception& ex) {
            errors.push_back(k + ": " + ex.what());
            return GridField(d);
        }
    }
};

Raw read_raw(const std::string& path) {
    Raw raw;
    std::ifstream in(path);
    if (!in) {
        raw.errors.push_back("cannot open config file '" + path + "'");
        return raw;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            raw.errors.push_back("line " + std::to_string(lineno) +
                                 ": expected 'section.key = value'");
            continue;
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            raw.errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (raw.kv.count(key))
            raw.errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                 "'");
        raw.kv[key] = value;
    }
    for (const auto& [k, v] : raw.kv)
        if (!known_keys().count(k)) raw.errors.push_back("unknown key '" + k + "'");
    return raw;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Paren-aware split of "name(a,b,...)" into name and numeric args.
bool split_call(const std::string& text, std::string& name, std::vector<double>& args) {
    const std::string t = strip(text);
    const size_t open = t.find('(');
    if (open == std::string::npos) {
        name = t;
        args.clear();
        return true;
    }
    if (t.back() != ')') return false;
    name = strip(t.substr(0, open));
    args.clear();
    std::string cur;
    for (char ch : t.substr(open + 1, t.size() - open - 2) + ",") {
        if (ch == ',') {
            const std::string v = strip(cur);
            if (!v.empty()) {
                try {
                    size_t pos = 0;
                    args.push_back(std::stod(v, &pos));
                    if (pos != v.size()) return false;
                } catch (const std::exception&) {
                    return false;
                }
            }
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return true;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

RunConfig parse_config(const std::string& path) {
    Raw raw = read_raw(path);
    if (!raw.errors.empty() && raw.kv.empty()) throw ConfigError(std::move(raw.errors));

    RunConfig cfg;

    // Canonical hash over sorted key=value pairs.
    std::string canon;
    for (const auto& [k, v] : raw.kv) canon += k + "=" + v + "\n";
    std::ostringstream hx;
    hx << std::hex << fnv1a(canon);
    cfg.config_hash = hx.str();

    // ---- grid ----
    const int dim = raw.integer("problem.dim", 1);
    std::vector<double> extent = raw.list("problem.extent", {0.0, 1.0});
    std::vector<double> nlist = raw.list("problem.n", {33.0});
    GridDomain domain;
    try {
        std::vector<AxisExtent> ext;
        if (static_cast<int>(extent.size()) == 2 * dim) {
            for (int a = 0; a < dim; ++a) ext.push_back({extent[2 * a], extent[2 * a + 1]});
        } else if (extent.size() == 2) {
            for (int a = 0; a < dim; ++a) ext.push_back({extent[0], extent[1]});
        } else {
            throw std::invalid_argument("problem.extent: need [lo,hi] or one pair per axis");
        }
        std::vector<int> nn;
        if (static_cast<int>(nlist.size()) == dim) {
            for (double v : nlist) nn.push_back(static_cast<int>(v));
        } else if (nlist.size() == 1) {
            for (int a = 0; a < dim; ++a) nn.push_back(static_cast<int>(nlist[0]));
        } else {
            throw std::invalid_argument("problem.n: need one count or one per axis");
        }
        domain = make_grid(dim, ext, nn);
    } catch (const std::exception& ex) {
        raw.errors.push_back(std::string("problem grid: ") + ex.what());
        throw ConfigError(std::move(raw.errors));
    }

    // ---- operator ----
    CoefficientSpec coef = CoefficientSpec::laplace();
    {
        std::string nm;
        std::vector<double> args;
        const std::string text = raw.name("problem.operator", "laplace");
        if (!split_call(text, nm, args)) {
            raw.errors.push_back("problem.operator: malformed '" + text + "'");
        } else if (nm == "laplace") {
            if (!args.empty()) raw.errors.push_back("problem.operator: laplace takes no arguments");
        } else if (nm == "diagonal") {
            if (args.size() == 1)
                coef = CoefficientSpec::diagonal({args[0], args[0]});
            else if (args.size() == 2)
                coef = CoefficientSpec::diagonal({args[0], args[1]});
            else
                raw.errors.push_back("problem.operator: diagonal(c) or diagonal(c0,c1)");
        } else if (nm == "diagonal_linear") {
            if (args.size() == 2)
                coef = CoefficientSpec::diagonal({args[0], args[0]}, {args[1], args[1]});
            else
                raw.errors.push_back("problem.operator: diagonal_linear(base,slope)");
        } else {
            raw.errors.push_back("problem.operator: unknown operator '" + nm +
                                 "'; catalog: laplace, diagonal, diagonal_linear");
        }
    }

    // ---- nonlinearity ----
    Nonlinearity f = Nonlinearity::zero();
    {
        std::string nm;
        std::vector<double> args;
        const std::string text = raw.name("problem.nonlinearity", "zero");
        if (!split_call(text, nm, args)) {
            raw.errors.push_back("problem.nonlinearity: malformed '" + text + "'");
        } else {
            try {
                if (nm == "zero")
                    f = Nonlinearity::zero();
                else if (nm == "cubic")
                    f = Nonlinearity::cubic();
                else if (nm == "scaled_cubic" && args.size() == 1)
                    f = Nonlinearity::scaled_cubic(args[0]);
                else if (nm == "sinh")
                    f = args.empty() ? Nonlinearity::sinh() : Nonlinearity::sinh(args[0]);
                else
                    raw.errors.push_back("problem.nonlinearity: unknown '" + text +
                                         "'; catalog: zero, cubic, scaled_cubic(c), sinh(c)");
            } catch (const std::exception& ex) {
                raw.errors.push_back(std::string("problem.nonlinearity: ") + ex.what());
            }
        }
    }

    // ---- solver ----
    PdeSolveOptions pde;
    pde.newton_tol = raw.number("solver.newton_tol", 1e-11);
    pde.linear_rel_tol = raw.number("solver.linear_tol", 1e-12);
    cfg.solver.stationarity_tol = raw.number("solver.stationarity_tol", 1e-10);
    cfg.solver.max_iterations = raw.integer("solver.max_iterations", 20000);
    cfg.solver.multistart = raw.integer("solver.multistart", 0);
    cfg.solver.switching_tol_rel = raw.number("solver.switching_tol_rel", 1e-10);
    cfg.seed = static_cast<uint64_t>(raw.number("experiment.seed", 1.0));
    cfg.solver.seed = cfg.seed;
    cfg.out_dir = raw.name("experiment.out", "out");

    // ---- data fields ----
    GridField zeta = raw.field("problem.zeta", "constant(0)", domain);
    GridField alpha = raw.field("problem.alpha", "constant(-1)", domain);
    GridField beta = raw.field("problem.beta", "constant(1)", domain);

    QSpec Q = QSpec::whole_space();
    {
        std::string nm;
        std::vector<double> args;
        const std::string text = raw.name("problem.Q", "whole");
        if (!split_call(text, nm, args) ||
            !((nm == "whole" && args.empty()) || (nm == "ball" && args.size() == 1))) {
            raw.errors.push_back("problem.Q: expected whole or ball(R), got '" + text + "'");
        } else if (nm == "ball") {
            try {
                Q = QSpec::ball(args[0]);
            } catch (const std::exception& ex) {
                raw.errors.push_back(std::string("problem.Q: ") + ex.what());
            }
        }
    }

    NormMode mode = NormMode::AllL2;
    {
        const std::string m = raw.name("problem.norm_mode", "l2");
        if (m == "l2")
            mode = NormMode::AllL2;
        else if (m == "bangbang")
            mode = NormMode::BangBang;
        else
            raw.errors.push_back("problem.norm_mode: expected l2 or bangbang, got '" + m + "'");
    }

    // ---- integrand ----
    CostIntegrand L = CostIntegrand::zero();
    const std::string integrand = raw.name("problem.integrand", "zero");
    const std::string target_mode = raw.name("problem.target_mode", "field");
    EllipticOperator op;
    try {
        op = assemble_operator(domain, coef);
    } catch (const std::exception& ex) {
        raw.errors.push_back(std::string("problem.operator: ") + ex.what());
        throw ConfigError(std::move(raw.errors));
    }

    if (integrand == "tracking") {
        if (target_mode == "field") {
            if (!raw.has("problem.target")) {
                raw.errors.push_back("problem.target: required for the tracking integrand");
            } else {
                L = CostIntegrand::tracking(raw.field("problem.target", "constant(0)", domain));
            }
        } else if (target_mode == "manufactured_adjoint") {
            if (!raw.has("problem.adjoint_shape")) {
                raw.errors.push_back(
                    "problem.adjoint_shape: required for target_mode = manufactured_adjoint");
            } else {
                const GridField shape =
                    raw.field("problem.adjoint_shape", "constant(0)", domain);
                if (raw.errors.empty()) {
                    try {
                        L = CostIntegrand::tracking(manufactured_tracking_target(
                            domain, op, f, alpha, beta, shape, pde));
                    } catch (const std::exception& ex) {
                        raw.errors.push_back(std::string("problem.adjoint_shape: ") + ex.what());
                    }
                }
            }
        } else {
            raw.errors.push_back("problem.target_mode: expected field or manufactured_adjoint");
        }
    } else if (integrand != "zero") {
        raw.errors.push_back("problem.integrand: unknown '" + integrand +
                             "'; catalog: zero, tracking");
    }

    const double p0 = raw.number("problem.p0", 2.0);

    if (!raw.errors.empty()) throw ConfigError(std::move(raw.errors));

    try {
        cfg.instance = make_instance(domain, std::move(op), f, std::move(L), std::move(zeta),
                                     std::move(alpha), std::move(beta), Q, mode, p0, pde);
    } catch (const std::exception& ex) {
        raw.errors.push_back(std::string("problem: ") + ex.what());
        throw ConfigError(std::move(raw.errors));
    }

    // ---- base perturbation ----
    cfg.base.eJ = raw.field("perturb.eJ", "constant(0)", domain);
    cfg.base.ey = raw.field("perturb.ey", "constant(0)", domain);
    cfg.base.ealpha = raw.field("perturb.ealpha", "constant(0)", domain);
    cfg.base.ebeta = raw.field("perturb.ebeta", "constant(0)", domain);
    cfg.base.mode = mode;

    // ---- fd ----
    cfg.fd.steps = raw.list("fd.steps", {1e-2, 3e-3, 1e-3, 3e-4});
    cfg.fd.tol_pass = raw.number("fd.tol_pass", 5e-3);
    cfg.fd.solver_tol_factor = raw.number("fd.solver_tol_factor", 0.1);
    cfg.fd.solve = cfg.solver;
    {
        auto dir_of = [&](const std::string& jkey, const std::string& ykey,
                          const std::string& akey, const std::string& bkey) {
            PerturbationE d = zero_perturbation(domain, mode);
            d.eJ = raw.field(jkey, "constant(0)", domain);
            d.ey = raw.field(ykey, "constant(0)", domain);
            d.ealpha = raw.field(akey, "constant(0)", domain);
            d.ebeta = raw.field(bkey, "constant(0)", domain);
            return d;
        };
        const std::string sin_default = dim == 2 ? "sinpi(1,1,1)" : "sinpi(1,1)";
        PerturbationE pure = zero_perturbation(domain, mode);
        pure.eJ = raw.field("fd.dir_eJ", sin_default, domain);
        cfg.fd_directions.emplace_back("pure_eJ", pure);
        pure = zero_perturbation(domain, mode);
        pure.ey = raw.field("fd.dir_ey", "bump(0.5,0.25,1)", domain);
        cfg.fd_directions.emplace_back("pure_ey", pure);
        pure = zero_perturbation(domain, mode);
        pure.ealpha = raw.field("fd.dir_ealpha", "constant(0.5)", domain);
        cfg.fd_directions.emplace_back("pure_ealpha", pure);
        pure = zero_perturbation(domain, mode);
        pure.ebeta = raw.field("fd.dir_ebeta", "constant(-0.5)", domain);
        cfg.fd_directions.emplace_back("pure_ebeta", pure);
        if (raw.has("fd.mixed1_eJ") || raw.has("fd.mixed1_ey") || raw.has("fd.mixed1_ealpha") ||
            raw.has("fd.mixed1_ebeta"))
            cfg.fd_directions.emplace_back(
                "mixed1", dir_of("fd.mixed1_eJ", "fd.mixed1_ey", "fd.mixed1_ealpha",
                                 "fd.mixed1_ebeta"));
        if (raw.has("fd.mixed2_eJ") || raw.has("fd.mixed2_ey") || raw.has("fd.mixed2_ealpha") ||
            raw.has("fd.mixed2_ebeta"))
            cfg.fd_directions.emplace_back(
                "mixed2", dir_of("fd.mixed2_eJ", "fd.mixed2_ey", "fd.mixed2_ealpha",
                                 "fd.mixed2_ebeta"));
    }

    // ---- measure ----
    cfg.measure_epsilons = raw.list("measure.epsilons", {0.35, 0.2, 0.11, 0.063, 0.036, 0.02});
    {
        const std::string src = raw.name("measure.source", "adjoint");
        if (src == "adjoint") {
            cfg.measure_on_adjoint = true;
        } else if (src == "field") {
            cfg.measure_on_adjoint = false;
            cfg.measure_field = raw.field("measure.field", "linear(0,1,-0.5)", domain);
        } else {
            raw.errors.push_back("measure.source: expected adjoint or field");
        }
    }
    if (raw.has("measure.kappa_min")) cfg.measure_kappa_min = raw.number("measure.kappa_min", 0);
    if (raw.has("measure.kappa_max")) cfg.measure_kappa_max = raw.number("measure.kappa_max", 0);
    if (raw.has("measure.K_min")) cfg.measure_K_min = raw.number("measure.K_min", 0);
    if (raw.has("measure.K_max")) cfg.measure_K_max = raw.number("measure.K_max", 0);

    // ---- growth ----
    cfg.growth_samples = raw.integer("growth.samples", 1000);
    if (raw.has("growth.kappa")) cfg.growth_kappa = raw.number("growth.kappa", 1.0);

    // ---- ssc ----
    cfg.ssc_tau_rel = raw.number("ssc.tau_rel", 0.5);
    if (raw.has("ssc.tau")) cfg.ssc_tau = raw.number("ssc.tau", 0.0);
    cfg.ssc_samples = raw.integer("ssc.samples", 500);
    cfg.ssc_delta_target = raw.number("ssc.delta_target", 0.0);
    cfg.ssc_refine = raw.integer("ssc.refine", 80);
    cfg.ssc_oracle_rel_tol = raw.number("ssc.oracle_rel_tol", 0.10);

    // ---- holder ----
    cfg.holder_sizes = raw.list("holder.sizes", {0.3, 0.2, 0.13, 0.087, 0.058, 0.039, 0.026,
                                                 0.017});
    cfg.holder_family = zero_perturbation(domain, mode);
    cfg.holder_family.eJ = raw.field("holder.family_eJ", "constant(0)", domain);
    cfg.holder_family.ey = raw.field("holder.family_ey", "constant(0)", domain);
    cfg.holder_family.ealpha = raw.field("holder.family_ealpha", "constant(0)", domain);
    cfg.holder_family.ebeta = raw.field("holder.family_ebeta", "constant(0)", domain);
    cfg.holder_min_exponent = raw.number("holder.min_exponent", 0.0);
    cfg.holder_min_r2 = raw.number("holder.min_r2", 0.0);
    if (raw.has("holder.kappa")) cfg.holder_kappa = raw.number("holder.kappa", 1.0);

    // ---- sweep ----
    cfg.sweep_sizes = raw.list("sweep.sizes", {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625,
                                               0.0078125, 0.00390625});
    cfg.sweep_family = zero_perturbation(domain, mode);
    cfg.sweep_family.eJ = raw.field("sweep.family_eJ", "constant(0)", domain);
    cfg.sweep_family.ey = raw.field("sweep.family_ey", "constant(0)", domain);
    cfg.sweep_family.ealpha = raw.field("sweep.family_ealpha", "constant(0)", domain);
    cfg.sweep_family.ebeta = raw.field("sweep.family_ebeta", "constant(0)", domain);

    // ---- coderivative ----
    cfg.coderivative_candidates = raw.integer("coderivative.candidates", 100);
    cfg.coderivative_tol = raw.number("coderivative.tol", 1e-6);
    cfg.coderivative_margin = raw.number("coderivative.margin", 0.1);
    cfg.coderivative_oracle_samples = raw.integer("coderivative.oracle_samples", 200);

    if (!raw.errors.empty()) throw ConfigError(std::move(raw.errors));
    return cfg;
}

const std::vector<std::string>& command_list() {
    static const std::vector<std::string> cmds = {
        "solve",        "subgradient",  "fd-check",           "holder-sweep", "measure-fit",
        "growth-check", "ssc-check",    "coderivative-check", "sweep-bounded"};
    return cmds;
}

std::string version_string() { return "ocstab 0.1.0"; }

}  // namespace ocstab
