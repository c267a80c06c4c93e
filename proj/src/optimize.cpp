#include "ocstab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ocstab/rng.hpp"

namespace ocstab {

GridField project_box(const GridField& u, const GridField& lower, const GridField& upper,
                      const QSpec& Q) {
    if (!(u.domain() == lower.domain()) || !(u.domain() == upper.domain()))
        throw std::invalid_argument("project_box: fields live on different grids");
    for (int i = 0; i < u.size(); ++i)
        if (lower[i] > upper[i])
            throw std::invalid_argument("project_box: lower bound exceeds upper bound at node " +
                                        std::to_string(i));

    GridField p(u.domain());
    auto clamp_all = [&](const GridField& src) {
        for (int i = 0; i < src.size(); ++i) p[i] = std::clamp(src[i], lower[i], upper[i]);
    };
    clamp_all(u);
    if (Q.kind == QSpec::Kind::WholeSpace) return p;

    for (int sweep = 0; sweep < 10000; ++sweep) {
        const double nrm = norm(p, NormKind::L2);
        if (nrm <= Q.radius) return p;
        GridField scaled = (Q.radius / nrm) * p;
        clamp_all(scaled);
        double change = 0.0;
        for (int i = 0; i < p.size(); ++i) change = std::max(change, std::abs(p[i] - scaled[i]));
        if (change <= 1e-12) {
            const double n2 = norm(p, NormKind::L2);
            if (n2 > Q.radius) p *= Q.radius / n2;
            return p;
        }
    }
    throw std::runtime_error("project_box: clamp/scale alternation did not settle");
}

namespace {

struct Bounds {
    GridField lower, upper;
};

Bounds effective_bounds(const ProblemInstance& inst, const PerturbationE& e) {
    Bounds b{inst.alpha + e.ealpha, inst.beta + e.ebeta};
    for (int i = 0; i < b.lower.size(); ++i)
        if (b.lower[i] > b.upper[i])
            throw std::invalid_argument(
                "perturbed bounds are infeasible: alpha+e_alpha > beta+e_beta at node " +
                std::to_string(i));
    return b;
}

// Cost value without the adjoint solve (line-search helper).
double cost_value(const ProblemInstance& inst, const GridField& u, const PerturbationE& e,
                  GridField* y_out = nullptr) {
    const GridField rhs = u + e.ey;
    StateSolveReport rep = solve_state(inst.op, inst.f, rhs, inst.pde);
    if (!rep.converged)
        throw std::runtime_error("state solver did not converge during a cost evaluation");
    double tracking = 0.0, quad = 0.0;
    for (int i = 0; i < rep.y.size(); ++i) {
        tracking += inst.L.L(rep.y[i], i);
        quad += 0.5 * inst.zeta[i] * rhs[i] * rhs[i];
    }
    const double value = inst.domain.cell_volume() * (tracking + quad) + inner(e.eJ, rep.y);
    if (y_out) *y_out = std::move(rep.y);
    return value;
}

double box_gap(const GridField& g, const GridField& u, const Bounds& b) {
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i)
        acc += std::max(g[i] * (u[i] - b.lower[i]), g[i] * (u[i] - b.upper[i]));
    return g.domain().cell_volume() * acc;
}

double stationarity_residual(const ProblemInstance& inst, const GridField& u, const GridField& g,
                             const Bounds& b) {
    const GridField probe = project_box(u - g, b.lower, b.upper, inst.Q);
    return norm(u - probe, NormKind::L2);
}

void finalize_record(const ProblemInstance& inst, SolutionRecord& rec, const Bounds& b) {
    const double phinf = norm(rec.phi, NormKind::Linf);
    rec.switching_tolerance = 1e-10 * phinf;
    int at_bound = 0, flat = 0;
    const double act = inst.activity_tol * inst.bound_scale();
    for (int i = 0; i < rec.control.size(); ++i) {
        if (rec.control[i] - b.lower[i] <= act || b.upper[i] - rec.control[i] <= act) ++at_bound;
        if (std::abs(rec.phi[i]) <= rec.switching_tolerance) ++flat;
    }
    rec.bound_fraction = static_cast<double>(at_bound) / rec.control.size();
    rec.flat_adjoint = flat > rec.control.size() / 2;
}

SolutionRecord projected_gradient_run(const ProblemInstance& inst, const PerturbationE& e,
                                      GridField u, const Bounds& b, const SolveOptions& opts) {
    SolutionRecord rec;
    rec.e = e;

    // With f linear the reduced cost is an exact quadratic: steps along the
    // projected direction can be minimized from inner products alone, with
    // no cost differencing and hence no floating-point floor.
    const bool quadratic = inst.f.kind == Nonlinearity::Kind::Zero;

    u = project_box(u, b.lower, b.upper, inst.Q);
    CostEvaluation ev = evaluate_cost(inst, u, e);
    GridField g = ev.phi;
    for (int i = 0; i < g.size(); ++i) g[i] += inst.zeta[i] * (u[i] + e.ey[i]);

    double step = 1.0;
    GridField u_prev = u, g_prev = g;
    bool have_prev = false;

    for (int it = 0; it < opts.max_iterations; ++it) {
        rec.iterations = it;
        rec.stationarity = stationarity_residual(inst, u, g, b);
        if (rec.stationarity <= opts.stationarity_tol) {
            rec.converged = true;
            break;
        }

        if (have_prev) {
            const GridField s = u - u_prev;
            const GridField dg = g - g_prev;
            const double ss = inner(s, s), sdg = inner(s, dg);
            if (sdg > 0.0) step = std::clamp(ss / sdg, 1e-10, 1e10);
        }

        bool accepted = false;
        if (quadratic) {
            const GridField trial = project_box(axpy(u, -step, g), b.lower, b.upper, inst.Q);
            const GridField dirn = trial - u;
            const double gd = inner(g, dirn);
            if (gd < 0.0) {
                const GridField z = solve_linearized(inst.op, ev.y, inst.f, dirn, inst.pde);
                double curv = 0.0;
                for (int i = 0; i < z.size(); ++i) {
                    curv += inst.L.Lyy(ev.y[i], i) * z[i] * z[i];
                    curv += inst.zeta[i] * dirn[i] * dirn[i];
                }
                curv *= inst.domain.cell_volume();
                const double s_exact = curv > 0.0 ? std::min(1.0, -gd / curv) : 1.0;
                u_prev = u;
                g_prev = g;
                have_prev = true;
                u = axpy(u, s_exact, dirn);
                ev = evaluate_cost(inst, u, e);
                g = ev.phi;
                for (int i = 0; i < g.size(); ++i) g[i] += inst.zeta[i] * (u[i] + e.ey[i]);
                accepted = true;
            }
        } else {
            double t = step;
            const double slack = 5e-15 * (1.0 + std::abs(ev.value));
            for (int ls = 0; ls < 60; ++ls) {
                const GridField trial = project_box(axpy(u, -t, g), b.lower, b.upper, inst.Q);
                const double pred = inner(g, trial - u);
                const double trial_val = cost_value(inst, trial, e);
                if (trial_val <= ev.value + opts.armijo_c1 * pred + slack) {
                    u_prev = u;
                    g_prev = g;
                    have_prev = true;
                    u = trial;
                    ev = evaluate_cost(inst, u, e);
                    g = ev.phi;
                    for (int i = 0; i < g.size(); ++i) g[i] += inst.zeta[i] * (u[i] + e.ey[i]);
                    accepted = true;
                    break;
                }
                t *= opts.backtrack;
            }
        }
        if (!accepted) break;  // numerical floor; the residual check decides
    }

    rec.control = u;
    rec.y = ev.y;
    rec.phi = ev.phi;
    rec.value = ev.value;
    GridField g_final = rec.phi;
    for (int i = 0; i < g_final.size(); ++i)
        g_final[i] += inst.zeta[i] * (rec.control[i] + e.ey[i]);
    rec.stationarity = stationarity_residual(inst, rec.control, g_final, b);
    rec.duality_gap = box_gap(g_final, rec.control, b);
    if (rec.stationarity <= opts.stationarity_tol) rec.converged = true;
    finalize_record(inst, rec, b);
    return rec;
}

bool nonconvex_catalog(const ProblemInstance& inst) {
    return inst.f.kind != Nonlinearity::Kind::Zero &&
           inst.L.kind == CostIntegrand::Kind::Tracking;
}

}  // namespace

SolutionRecord solve_control_problem(const ProblemInstance& inst, const PerturbationE& e,
                                     const GridField* init, const SolveOptions& opts) {
    if (!(opts.stationarity_tol > 0.0))
        throw std::invalid_argument("solve_control_problem: tolerance must be positive");
    if (opts.mode == SolveOptions::Mode::ConditionalGradient ||
        (opts.mode == SolveOptions::Mode::Auto && inst.mode == NormMode::BangBang &&
         inst.zeta_is_zero()))
        return solve_bang_bang(inst, e, opts, init);

    const Bounds b = effective_bounds(inst, e);

    GridField start(inst.domain);
    if (init) {
        start = *init;
    } else {
        for (int i = 0; i < start.size(); ++i) start[i] = 0.5 * (b.lower[i] + b.upper[i]);
    }

    int starts = opts.multistart;
    if (starts <= 0) starts = nonconvex_catalog(inst) ? 3 : 1;

    SolutionRecord best = projected_gradient_run(inst, e, start, b, opts);
    double worst_gap = 0.0;
    Rng rng(opts.seed);
    for (int s = 1; s < starts; ++s) {
        GridField u0(inst.domain);
        for (int i = 0; i < u0.size(); ++i) u0[i] = rng.uniform(b.lower[i], b.upper[i]);
        SolutionRecord cand = projected_gradient_run(inst, e, u0, b, opts);
        worst_gap = std::max(worst_gap, std::abs(cand.value - best.value));
        if (cand.value < best.value) best = std::move(cand);
    }
    best.multistart_spread = worst_gap;
    best.multistart_disagreement = worst_gap > opts.multistart_flag_tol;
    return best;
}

SolutionRecord solve_bang_bang(const ProblemInstance& inst, const PerturbationE& e,
                               const SolveOptions& opts, const GridField* init) {
    if (!(inst.zeta_is_zero() && inst.Q.kind == QSpec::Kind::WholeSpace))
        throw std::invalid_argument(
            "solve_bang_bang: requires the bang-bang regime (zeta == 0, Q whole-space)");
    const Bounds b = effective_bounds(inst, e);

    SolutionRecord rec;
    rec.e = e;

    GridField u(inst.domain);
    if (init) {
        u = project_box(*init, b.lower, b.upper, inst.Q);
    } else {
        for (int i = 0; i < u.size(); ++i) u[i] = 0.5 * (b.lower[i] + b.upper[i]);
    }

    CostEvaluation ev = evaluate_cost(inst, u, e);
    const bool quadratic = inst.f.kind == Nonlinearity::Kind::Zero;

    for (int it = 0; it < opts.max_iterations; ++it) {
        rec.iterations = it;
        const GridField& g = ev.phi;  // zeta == 0
        const double tol_sw = opts.switching_tol_rel * norm(g, NormKind::Linf);

        GridField v(inst.domain);
        for (int i = 0; i < v.size(); ++i) {
            if (g[i] > tol_sw)
                v[i] = b.lower[i];
            else if (g[i] < -tol_sw)
                v[i] = b.upper[i];
            else
                v[i] = u[i];
        }
        const GridField d = v - u;
        const double gap = -inner(g, d);
        rec.duality_gap = gap;
        const double gap_tol = std::max(opts.stationarity_tol, 5e-15 * (1.0 + std::abs(ev.value)));
        if (gap <= gap_tol) {
            rec.converged = true;
            break;
        }

        // Local curvature along the segment; exact minimizer for the
        // quadratic case, Armijo seed otherwise.
        const GridField z = solve_linearized(inst.op, ev.y, inst.f, d, inst.pde);
        double curv = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            curv += inst.L.Lyy(ev.y[i], i) * z[i] * z[i];
            curv -= ev.phi[i] * inst.f.fyy(ev.y[i]) * z[i] * z[i];
        }
        curv *= inst.domain.cell_volume();

        double t = 1.0;
        if (curv > 0.0) t = std::min(1.0, gap / curv);

        if (quadratic) {
            u = axpy(u, t, d);
            ev = evaluate_cost(inst, u, e);
        } else {
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                const GridField trial = axpy(u, t, d);
                const double trial_val = cost_value(inst, trial, e);
                if (trial_val <= ev.value - opts.armijo_c1 * t * gap) {
                    u = trial;
                    ev = evaluate_cost(inst, u, e);
                    accepted = true;
                    break;
                }
                t *= opts.backtrack;
            }
            if (!accepted) break;
        }
    }

    rec.control = u;
    rec.y = ev.y;
    rec.phi = ev.phi;
    rec.value = ev.value;
    rec.stationarity = stationarity_residual(inst, u, ev.phi, b);
    finalize_record(inst, rec, b);
    return rec;
}

SolutionRecord auto_solve(const ProblemInstance& inst, const PerturbationE& e,
                          const GridField* init, const SolveOptions& opts) {
    if (inst.mode == NormMode::BangBang && inst.zeta_is_zero() &&
        opts.mode != SolveOptions::Mode::ProjectedGradient)
        return solve_bang_bang(inst, e, opts, init);
    return solve_control_problem(inst, e, init, opts);
}

double verify_first_order(const ProblemInstance& inst, const SolutionRecord& record) {
    const Bounds b = effective_bounds(inst, record.e);
    GridField g = record.phi;
    for (int i = 0; i < g.size(); ++i)
        g[i] += inst.zeta[i] * (record.control[i] + record.e.ey[i]);
    return box_gap(g, record.control, b);
}

}  // namespace ocstab
