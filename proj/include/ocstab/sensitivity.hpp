#ifndef OCSTAB_SENSITIVITY_HPP
#define OCSTAB_SENSITIVITY_HPP

#include <string>
#include <vector>

#include "ocstab/optimize.hpp"

namespace ocstab {

/// Nodal partition into lower-active / inactive / upper-active with scale
/// 1 + ||beta - alpha||_inf. A node active at both bounds is a hard error
/// (only possible when the gap is below 2*tol*scale).
ActiveSetPartition partition_active_sets(const ProblemInstance& inst, const PerturbationE& e,
                                         const GridField& u, double tol = -1.0);

/// Quadrature measure of a node set: count * prod(h_i).
double set_measure(const GridDomain& d, size_t count);

/// Element of the normal cone N(u; Q): zero for interior points, the
/// outward ray direction u/||u||_L2 on the boundary of a ball.
struct QConeElement {
    enum class Tag { Zero, Ray };
    Tag tag = Tag::Zero;
    GridField ray_direction;  // unit outward normal; empty for Zero
};

QConeElement q_normal_cone_element(const ProblemInstance& inst, const GridField& u);

struct SubgradientCertificate {
    double inactive_residual = 0.0;     // max |g| over I2
    double lower_sign_violation = 0.0;  // max(0, -min_{I1} g)
    double upper_sign_violation = 0.0;  // max(0, max_{I3} g)
    double sum_identity_gap = 0.0;      // bang-bang: max |phi| over I2
    double cone_multiplier = 0.0;       // lambda of the N(u;Q) ray element
    double inactive_fraction = 0.0;     // |I2| / node count
    bool bangbang_warning = false;      // inactive fraction above threshold
};

/// Candidate marginal-function subgradient with its construction
/// certificates.
struct SubgradientE {
    DualE tuple;
    SubgradientCertificate certificate;
    std::vector<std::string> notes;
};

/// Necessary-condition tuple at a converged record in the all-L2 regime:
/// ey = phi + zeta*u, eJ = y, and the bound components split
/// g = phi + zeta*u + lambda*ray over the active sets. The ray multiplier
/// is the minimal-norm choice making the split exact on I2 (zero when u is
/// interior to Q).
SubgradientE regular_subgradient(const ProblemInstance& inst, const SolutionRecord& record);

struct LimitingSubgradientResult {
    SubgradientE tuple;
    bool coincides_with_regular = true;  // the two condition sets share one construction
};

/// Identical tuple to regular_subgradient: the Fréchet and limiting
/// necessary conditions coincide here because the constraint map is
/// normally regular.
LimitingSubgradientResult limiting_subgradient_conditions(const ProblemInstance& inst,
                                                          const SolutionRecord& record);

/// Bang-bang regime tuple: ey = phi, eJ = y, ealpha = phi on I1,
/// ebeta = phi on I3, with the sum identity ealpha + ebeta = phi certified
/// up to max |phi| over I2.
SubgradientE bangbang_subgradient(const ProblemInstance& inst, const SolutionRecord& record);

struct CoderivativeWitness {
    bool member = false;
    std::string reason;   // first failed clause when not a member
    GridField u_star1;    // ealpha + ebeta
    GridField u_star2;    // u_star1 - u_star
    double lambda = 0.0;  // ray multiplier of u_star2 (ball case)
};

/// Decision procedure for e* in D*G(e,u)(u*): zero ey/eJ slots, sign and
/// support conditions over the partition, and u_star2 in N(u;Q). The same
/// procedure decides the regular and the limiting coderivative.
CoderivativeWitness coderivative_membership(const ProblemInstance& inst,
                                            const ActiveSetPartition& partition,
                                            const QConeElement& cone, const DualE& estar,
                                            const GridField& ustar, double tol);

struct SingularEstimate {
    bool zero_only = false;  // Q-interior case: the estimate set is {0}
    std::string description;
};

/// Constraint description of the singular-subdifferential upper estimate;
/// membership of candidates is decided by coderivative_membership at
/// u* = 0.
SingularEstimate singular_upper_estimate(const ActiveSetPartition& partition,
                                         const QConeElement& cone);

CoderivativeWitness singular_membership(const ProblemInstance& inst,
                                        const ActiveSetPartition& partition,
                                        const QConeElement& cone, const DualE& estar, double tol);

}  // namespace ocstab

#endif
