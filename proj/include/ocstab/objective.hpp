#ifndef OCSTAB_OBJECTIVE_HPP
#define OCSTAB_OBJECTIVE_HPP

#include <string>

#include "ocstab/grid.hpp"
#include "ocstab/pde.hpp"

namespace ocstab {

/// Component norms of the perturbation space E. AllL2 is the setting with
/// every slot measured in L2; BangBang measures the bound shifts in Linf.
enum class NormMode { AllL2, BangBang };

/// Perturbation 4-tuple e = (e_J, e_y, e_alpha, e_beta).
struct PerturbationE {
    GridField eJ, ey, ealpha, ebeta;
    NormMode mode = NormMode::AllL2;
};

PerturbationE zero_perturbation(const GridDomain& d, NormMode mode = NormMode::AllL2);

/// Sum of the four component norms.
double norm_E(const PerturbationE& e);

/// e + s * d componentwise.
PerturbationE perturbation_axpy(const PerturbationE& e, double s, const PerturbationE& d);

/// Constraint set Q: the whole control space or a closed L2 ball of radius
/// R centered at 0.
struct QSpec {
    enum class Kind { WholeSpace, Ball };
    Kind kind = Kind::WholeSpace;
    double radius = 0.0;

    static QSpec whole_space() { return {}; }
    static QSpec ball(double R);
};

struct ProblemInstance {
    GridDomain domain;
    EllipticOperator op;
    Nonlinearity f;
    CostIntegrand L;
    GridField zeta;         // control cost weight, >= 0 nodally
    GridField alpha, beta;  // bounds with a strict nodal gap
    QSpec Q;
    NormMode mode = NormMode::AllL2;
    double p0 = 2.0;  // recorded exponent of the control space
    PdeSolveOptions pde;
    double activity_tol = 1e-8;

    bool zeta_is_zero() const;
    double bound_scale() const;  // 1 + ||beta - alpha||_inf
};

/// Validates nodal requirements: zeta >= 0, strict gap
/// alpha + 2*activity_tol*scale < beta, and the bang-bang regime rule
/// (NormMode::BangBang forces zeta == 0 and Q whole-space).
ProblemInstance make_instance(GridDomain domain, EllipticOperator op, Nonlinearity f,
                              CostIntegrand L, GridField zeta, GridField alpha, GridField beta,
                              QSpec Q = QSpec::whole_space(), NormMode mode = NormMode::AllL2,
                              double p0 = 2.0, PdeSolveOptions pde = {});

struct CostEvaluation {
    double value = 0.0;
    GridField y;    // state at u + e_y
    GridField phi;  // adjoint at (u, e)
    StateSolveReport state_report;
};

/// J(u+e_y) + (e_J, y_{u+e_y}) where J carries the tracking term and the
/// quadratic control cost evaluated at u + e_y.
CostEvaluation evaluate_cost(const ProblemInstance& inst, const GridField& u,
                             const PerturbationE& e);

/// Riesz representative of the u-derivative in the discrete L2 pairing:
/// phi_{u,e} + zeta * (u + e_y). The zeta term uses u + e_y so that the
/// field is the exact derivative of the discrete cost; it coincides with
/// phi + zeta*u whenever e_y = 0 or zeta = 0.
GridField gradient_u(const ProblemInstance& inst, const GridField& u, const PerturbationE& e);

/// Element of the dual space E*, represented componentwise as grid fields
/// via the discrete L2 pairing. Components pair with the perturbation slot
/// of the same name.
struct DualE {
    GridField ey, eJ, ealpha, ebeta;
};

/// <d, e>_E with every slot paired in the discrete L2 inner product.
double pair_dual(const DualE& d, const PerturbationE& e);

/// Partial derivative of the cost in e: (phi + zeta*(u+e_y), y, 0, 0).
/// The e_alpha and e_beta slots are exactly zero fields; the cost does not
/// see the bounds.
DualE gradient_e(const ProblemInstance& inst, const GridField& u, const PerturbationE& e);

/// Second derivative bilinear form
/// (v1, v2) -> int [ L_yy z1 z2 + zeta v1 v2 - phi f_yy z1 z2 ] dx
/// with z_i the linearized states at u + e_y.
double hessian_form(const ProblemInstance& inst, const GridField& u, const PerturbationE& e,
                    const GridField& v1, const GridField& v2);

/// Tracking target y_d built so that the discrete adjoint at the
/// switching-law control of phi_shape is exactly phi_shape: picks
/// u = alpha where phi_shape > 0, beta where phi_shape < 0, solves the
/// state, and back-substitutes y_d = y - A phi - f_y(y) phi. Intended for
/// the zeta = 0 bang-bang instances.
GridField manufactured_tracking_target(const GridDomain& d, const EllipticOperator& op,
                                       const Nonlinearity& f, const GridField& alpha,
                                       const GridField& beta, const GridField& phi_shape,
                                       const PdeSolveOptions& pde = {});

}  // namespace ocstab

#endif
