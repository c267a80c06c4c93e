#include "ocstab/sensitivity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ocstab {

ActiveSetPartition partition_active_sets(const ProblemInstance& inst, const PerturbationE& e,
                                         const GridField& u, double tol) {
    if (tol < 0.0) tol = inst.activity_tol;
    if (!(u.domain() == inst.domain))
        throw std::invalid_argument("partition_active_sets: control on a different grid");

    const double margin = tol * inst.bound_scale();
    ActiveSetPartition p;
    p.tolerance_used = margin;
    p.mask.resize(static_cast<size_t>(u.size()), 0);

    for (int i = 0; i < u.size(); ++i) {
        const double lo = inst.alpha[i] + e.ealpha[i];
        const double hi = inst.beta[i] + e.ebeta[i];
        const bool at_lower = u[i] - lo <= margin;
        const bool at_upper = hi - u[i] <= margin;
        if (at_lower && at_upper)
            throw std::runtime_error(
                "partition_active_sets: node " + std::to_string(i) +
                " is active at both bounds; use a smaller tolerance or a wider gap");
        if (at_lower) {
            p.mask[i] = 1;
            p.lower.push_back(i);
        } else if (at_upper) {
            p.mask[i] = 3;
            p.upper.push_back(i);
        } else {
            p.mask[i] = 2;
            p.inactive.push_back(i);
        }
    }
    return p;
}

double set_measure(const GridDomain& d, size_t count) {
    return d.cell_volume() * static_cast<double>(count);
}

QConeElement q_normal_cone_element(const ProblemInstance& inst, const GridField& u) {
    QConeElement c;
    if (inst.Q.kind == QSpec::Kind::WholeSpace) return c;
    const double nrm = norm(u, NormKind::L2);
    if (nrm < inst.Q.radius * (1.0 - 1e-10)) return c;  // strict interior by margin
    c.tag = QConeElement::Tag::Ray;
    c.ray_direction = (1.0 / nrm) * u;
    return c;
}

namespace {

SubgradientE build_tuple(const ProblemInstance& inst, const SolutionRecord& record,
                         const GridField& base, const ActiveSetPartition& part,
                         const QConeElement& cone) {
    SubgradientE s;
    GridField g = base;
    double lambda = 0.0;

    if (cone.tag == QConeElement::Tag::Ray && !part.inactive.empty()) {
        // Minimal-norm ray multiplier making the split exact on I2:
        // lambda = argmin_{l >= 0} sum_{I2} (base + l*ray)^2.
        double num = 0.0, den = 0.0;
        for (int i : part.inactive) {
            num -= base[i] * cone.ray_direction[i];
            den += cone.ray_direction[i] * cone.ray_direction[i];
        }
        if (den > 0.0) lambda = std::max(0.0, num / den);
    }
    if (cone.tag == QConeElement::Tag::Ray && lambda != 0.0) g = axpy(base, lambda, cone.ray_direction);

    s.tuple.ey = base;
    s.tuple.eJ = record.y;
    s.tuple.ealpha = GridField(inst.domain);
    s.tuple.ebeta = GridField(inst.domain);
    for (int i : part.lower) s.tuple.ealpha[i] = g[i];
    for (int i : part.upper) s.tuple.ebeta[i] = g[i];

    SubgradientCertificate& c = s.certificate;
    c.cone_multiplier = lambda;
    for (int i : part.inactive) c.inactive_residual = std::max(c.inactive_residual, std::abs(g[i]));
    for (int i : part.lower) c.lower_sign_violation = std::max(c.lower_sign_violation, -g[i]);
    for (int i : part.upper) c.upper_sign_violation = std::max(c.upper_sign_violation, g[i]);
    c.lower_sign_violation = std::max(0.0, c.lower_sign_violation);
    c.upper_sign_violation = std::max(0.0, c.upper_sign_violation);
    c.inactive_fraction = static_cast<double>(part.inactive.size()) / record.control.size();
    return s;
}

}  // namespace

SubgradientE regular_subgradient(const ProblemInstance& inst, const SolutionRecord& record) {
    if (!record.converged)
        throw std::invalid_argument("regular_subgradient: record is not converged");
    if (inst.mode != NormMode::AllL2)
        throw std::invalid_argument("regular_subgradient: requires the all-L2 regime");

    const ActiveSetPartition part = partition_active_sets(inst, record.e, record.control);
    const QConeElement cone = q_normal_cone_element(inst, record.control);

    GridField base = record.phi;
    for (int i = 0; i < base.size(); ++i)
        base[i] += inst.zeta[i] * (record.control[i] + record.e.ey[i]);

    SubgradientE s = build_tuple(inst, record, base, part, cone);
    s.notes.push_back("zeta-term convention: ey component uses zeta*(u+e_y)");
    if (cone.tag == QConeElement::Tag::Ray)
        s.notes.push_back("N(u;Q) representative: minimal-norm ray multiplier");
    s.certificate.sum_identity_gap = s.certificate.inactive_residual;
    return s;
}

LimitingSubgradientResult limiting_subgradient_conditions(const ProblemInstance& inst,
                                                          const SolutionRecord& record) {
    LimitingSubgradientResult r;
    r.tuple = regular_subgradient(inst, record);
    r.coincides_with_regular = true;
    r.tuple.notes.push_back("limiting conditions coincide with the regular conditions");
    return r;
}

SubgradientE bangbang_subgradient(const ProblemInstance& inst, const SolutionRecord& record) {
    if (inst.mode != NormMode::BangBang)
        throw std::invalid_argument("bangbang_subgradient: requires the bang-bang regime");

    const ActiveSetPartition part = partition_active_sets(inst, record.e, record.control);
    const QConeElement cone;  // whole space by regime validation

    SubgradientE s = build_tuple(inst, record, record.phi, part, cone);
    double sum_gap = 0.0;
    for (int i : part.inactive) sum_gap = std::max(sum_gap, std::abs(record.phi[i]));
    s.certificate.sum_identity_gap = sum_gap;
    s.certificate.bangbang_warning = s.certificate.inactive_fraction > 0.1;
    if (s.certificate.bangbang_warning)
        s.notes.push_back("warning: inactive fraction above 10%, record is not bang-bang");
    return s;
}

CoderivativeWitness coderivative_membership(const ProblemInstance&,
                                            const ActiveSetPartition& partition,
                                            const QConeElement& cone, const DualE& estar,
                                            const GridField& ustar, double tol) {
    CoderivativeWitness w;
    w.member = false;

    if (norm(estar.ey, NormKind::Linf) > tol) {
        w.reason = "e*_y is not zero";
        return w;
    }
    if (norm(estar.eJ, NormKind::Linf) > tol) {
        w.reason = "e*_J is not zero";
        return w;
    }
    for (int i = 0; i < estar.ealpha.size(); ++i) {
        if (partition.is_lower(i)) {
            if (estar.ealpha[i] < -tol) {
                w.reason = "e*_alpha negative on the lower-active set";
                return w;
            }
        } else if (std::abs(estar.ealpha[i]) > tol) {
            w.reason = "e*_alpha supported off the lower-active set";
            return w;
        }
        if (partition.is_upper(i)) {
            if (estar.ebeta[i] > tol) {
                w.reason = "e*_beta positive on the upper-active set";
                return w;
            }
        } else if (std::abs(estar.ebeta[i]) > tol) {
            w.reason = "e*_beta supported off the upper-active set";
            return w;
        }
    }

    w.u_star1 = estar.ealpha + estar.ebeta;
    w.u_star2 = w.u_star1 - ustar;
    if (cone.tag == QConeElement::Tag::Zero) {
        if (norm(w.u_star2, NormKind::Linf) > tol) {
            w.reason = "u*_2 nonzero with N(u;Q) = {0}";
            return w;
        }
        w.member = true;
        return w;
    }

    const GridField& r = cone.ray_direction;
    const double rr = inner(r, r);
    w.lambda = rr > 0.0 ? inner(w.u_star2, r) / rr : 0.0;
    if (w.lambda < -tol) {
        w.reason = "u*_2 points against the outward ray";
        return w;
    }
    const GridField resid = axpy(w.u_star2, -std::max(0.0, w.lambda), r);
    if (norm(resid, NormKind::Linf) > tol) {
        w.reason = "u*_2 is not a multiple of the outward ray";
        return w;
    }
    w.member = true;
    return w;
}

SingularEstimate singular_upper_estimate(const ActiveSetPartition& partition,
                                         const QConeElement& cone) {
    SingularEstimate e;
    if (cone.tag == QConeElement::Tag::Zero) {
        e.zero_only = true;
        e.description =
            "Q-interior case: e*_alpha + e*_beta in N(u;Q) = {0} together with the "
            "sign/support conditions forces e*_alpha = e*_beta = 0; the estimate set is {0}";
    } else {
        e.zero_only = false;
        e.description =
            "ball-boundary case: e* = (0, 0, e*_alpha, e*_beta) with e*_alpha >= 0 on I1 "
            "(lower-active, " +
            std::to_string(partition.lower.size()) +
            " nodes), zero elsewhere; e*_beta <= 0 on I3 (upper-active, " +
            std::to_string(partition.upper.size()) +
            " nodes), zero elsewhere; e*_alpha + e*_beta a nonnegative multiple of the "
            "outward ray";
    }
    return e;
}

CoderivativeWitness singular_membership(const ProblemInstance& inst,
                                        const ActiveSetPartition& partition,
                                        const QConeElement& cone, const DualE& estar,
                                        double tol) {
    return coderivative_membership(inst, partition, cone, estar, GridField(inst.domain), tol);
}

}  // namespace ocstab
