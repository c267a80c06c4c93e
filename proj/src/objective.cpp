#include "ocstab/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace ocstab {

PerturbationE zero_perturbation(const GridDomain& d, NormMode mode) {
    PerturbationE e;
    e.eJ = GridField(d);
    e.ey = GridField(d);
    e.ealpha = GridField(d);
    e.ebeta = GridField(d);
    e.mode = mode;
    return e;
}

double norm_E(const PerturbationE& e) {
    if (e.mode == NormMode::AllL2)
        return norm(e.eJ, NormKind::L2) + norm(e.ey, NormKind::L2) +
               norm(e.ealpha, NormKind::L2) + norm(e.ebeta, NormKind::L2);
    return norm(e.eJ, NormKind::L2) + norm(e.ey, NormKind::L2) +
           norm(e.ealpha, NormKind::Linf) + norm(e.ebeta, NormKind::Linf);
}

PerturbationE perturbation_axpy(const PerturbationE& e, double s, const PerturbationE& d) {
    PerturbationE r;
    r.eJ = axpy(e.eJ, s, d.eJ);
    r.ey = axpy(e.ey, s, d.ey);
    r.ealpha = axpy(e.ealpha, s, d.ealpha);
    r.ebeta = axpy(e.ebeta, s, d.ebeta);
    r.mode = e.mode;
    return r;
}

QSpec QSpec::ball(double R) {
    if (!(R > 0.0)) throw std::invalid_argument("QSpec::ball: radius must be positive");
    QSpec q;
    q.kind = Kind::Ball;
    q.radius = R;
    return q;
}

bool ProblemInstance::zeta_is_zero() const {
    for (int i = 0; i < zeta.size(); ++i)
        if (zeta[i] != 0.0) return false;
    return true;
}

double ProblemInstance::bound_scale() const {
    return 1.0 + norm(beta - alpha, NormKind::Linf);
}

ProblemInstance make_instance(GridDomain domain, EllipticOperator op, Nonlinearity f,
                              CostIntegrand L, GridField zeta, GridField alpha, GridField beta,
                              QSpec Q, NormMode mode, double p0, PdeSolveOptions pde) {
    ProblemInstance inst;
    inst.domain = domain;
    inst.op = std::move(op);
    inst.f = f;
    inst.L = std::move(L);
    inst.zeta = std::move(zeta);
    inst.alpha = std::move(alpha);
    inst.beta = std::move(beta);
    inst.Q = Q;
    inst.mode = mode;
    inst.p0 = p0;
    inst.pde = pde;

    if (!(inst.op.domain() == domain))
        throw std::invalid_argument("make_instance: operator assembled on a different grid");
    for (const GridField* g : {&inst.zeta, &inst.alpha, &inst.beta})
        if (!(g->domain() == domain))
            throw std::invalid_argument("make_instance: data field lives on a different grid");
    if (inst.L.kind == CostIntegrand::Kind::Tracking && !(inst.L.target.domain() == domain))
        throw std::invalid_argument("make_instance: tracking target lives on a different grid");

    for (int i = 0; i < inst.zeta.size(); ++i)
        if (inst.zeta[i] < 0.0)
            throw std::invalid_argument("make_instance: zeta must be nonnegative nodally");

    const double gap_required = 2.0 * inst.activity_tol * inst.bound_scale();
    for (int i = 0; i < inst.alpha.size(); ++i)
        if (!(inst.alpha[i] + gap_required < inst.beta[i]))
            throw std::invalid_argument(
                "make_instance: bounds must satisfy alpha + 2*tol*scale < beta at every node");

    if (mode == NormMode::BangBang) {
        if (!inst.zeta_is_zero())
            throw std::invalid_argument(
                "make_instance: the bang-bang norm mode requires zeta == 0");
        if (inst.Q.kind != QSpec::Kind::WholeSpace)
            throw std::invalid_argument(
                "make_instance: the bang-bang norm mode requires Q = whole space");
    }
    return inst;
}

namespace {
void require_fields(const ProblemInstance& inst, const GridField& u, const PerturbationE& e) {
    if (!(u.domain() == inst.domain))
        throw std::invalid_argument("control lives on a different grid than the instance");
    for (const GridField* g : {&e.eJ, &e.ey, &e.ealpha, &e.ebeta})
        if (!(g->domain() == inst.domain))
            throw std::invalid_argument("perturbation lives on a different grid than the instance");
}
}  // namespace

CostEvaluation evaluate_cost(const ProblemInstance& inst, const GridField& u,
                             const PerturbationE& e) {
    require_fields(inst, u, e);
    const GridField rhs = u + e.ey;

    CostEvaluation out;
    out.state_report = solve_state(inst.op, inst.f, rhs, inst.pde);
    if (!out.state_report.converged)
        throw std::runtime_error("evaluate_cost: state solver did not converge (residual " +
                                 std::to_string(out.state_report.residual) + ")");
    out.y = out.state_report.y;

    double tracking = 0.0, quad = 0.0;
    for (int i = 0; i < out.y.size(); ++i) {
        tracking += inst.L.L(out.y[i], i);
        quad += 0.5 * inst.zeta[i] * rhs[i] * rhs[i];
    }
    const double vol = inst.domain.cell_volume();
    out.value = vol * (tracking + quad) + inner(e.eJ, out.y);
    out.phi = solve_adjoint(inst.op, out.y, inst.f, inst.L, e.eJ, inst.pde);
    return out;
}

GridField gradient_u(const ProblemInstance& inst, const GridField& u, const PerturbationE& e) {
    const CostEvaluation ev = evaluate_cost(inst, u, e);
    GridField g = ev.phi;
    for (int i = 0; i < g.size(); ++i) g[i] += inst.zeta[i] * (u[i] + e.ey[i]);
    return g;
}

double pair_dual(const DualE& d, const PerturbationE& e) {
    return inner(d.eJ, e.eJ) + inner(d.ey, e.ey) + inner(d.ealpha, e.ealpha) +
           inner(d.ebeta, e.ebeta);
}

DualE gradient_e(const ProblemInstance& inst, const GridField& u, const PerturbationE& e) {
    const CostEvaluation ev = evaluate_cost(inst, u, e);
    DualE d;
    d.eJ = ev.y;
    d.ey = ev.phi;
    for (int i = 0; i < d.ey.size(); ++i) d.ey[i] += inst.zeta[i] * (u[i] + e.ey[i]);
    d.ealpha = GridField(inst.domain);
    d.ebeta = GridField(inst.domain);
    return d;
}

GridField manufactured_tracking_target(const GridDomain& d, const EllipticOperator& op,
                                       const Nonlinearity& f, const GridField& alpha,
                                       const GridField& beta, const GridField& phi_shape,
                                       const PdeSolveOptions& pde) {
    GridField u(d);
    for (int i = 0; i < u.size(); ++i) {
        if (phi_shape[i] > 0.0)
            u[i] = alpha[i];
        else if (phi_shape[i] < 0.0)
            u[i] = beta[i];
        else
            u[i] = 0.5 * (alpha[i] + beta[i]);
    }
    PdeSolveOptions tight = pde;
    tight.newton_tol = std::min(tight.newton_tol, 1e-12);
    const StateSolveReport rep = solve_state(op, f, u, tight);
    if (!rep.converged)
        throw std::runtime_error("manufactured_tracking_target: state solve did not converge");
    const GridField Aphi = op.apply(phi_shape);
    GridField y_d(d);
    for (int i = 0; i < y_d.size(); ++i)
        y_d[i] = rep.y[i] - Aphi[i] - f.fy(rep.y[i]) * phi_shape[i];
    return y_d;
}

double hessian_form(const ProblemInstance& inst, const GridField& u, const PerturbationE& e,
                    const GridField& v1, const GridField& v2) {
    require_fields(inst, u, e);
    if (!(v1.domain() == inst.domain) || !(v2.domain() == inst.domain))
        throw std::invalid_argument("hessian_form: directions live on a different grid");

    const CostEvaluation ev = evaluate_cost(inst, u, e);
    const GridField z1 = solve_linearized(inst.op, ev.y, inst.f, v1, inst.pde);
    const GridField z2 = solve_linearized(inst.op, ev.y, inst.f, v2, inst.pde);

    double acc = 0.0;
    for (int i = 0; i < z1.size(); ++i) {
        acc += inst.L.Lyy(ev.y[i], i) * z1[i] * z2[i];
        acc += inst.zeta[i] * v1[i] * v2[i];
        acc -= ev.phi[i] * inst.f.fyy(ev.y[i]) * z1[i] * z2[i];
    }
    return inst.domain.cell_volume() * acc;
}

}  // namespace ocstab
