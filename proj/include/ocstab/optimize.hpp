#ifndef OCSTAB_OPTIMIZE_HPP
#define OCSTAB_OPTIMIZE_HPP

#include <cstdint>
#include <optional>

#include "ocstab/active_set.hpp"
#include "ocstab/objective.hpp"

namespace ocstab {

struct SolveOptions {
    enum class Mode { Auto, ProjectedGradient, ConditionalGradient };
    Mode mode = Mode::Auto;
    double stationarity_tol = 1e-10;  // PG: fixed-step-1 residual; CG: duality gap
    int max_iterations = 20000;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    uint64_t seed = 1u;
    int multistart = 0;  // 0 = auto: 3 for the nonconvex catalog entries, else 1
    double switching_tol_rel = 1e-10;      // |phi| band treated as undecided in CG steps
    double multistart_flag_tol = 1e-4;
};

struct SolutionRecord {
    GridField control, y, phi;
    double value = 0.0;         // mu(e) candidate
    double stationarity = 0.0;  // ||u - P(u - g)||_L2
    double duality_gap = 0.0;   // max_{box} <g, u - v>; CG stopping quantity
    int iterations = 0;
    bool converged = false;
    PerturbationE e;
    double bound_fraction = 0.0;
    bool flat_adjoint = false;  // |phi| below the switching band on > 50% of nodes
    double multistart_spread = 0.0;
    bool multistart_disagreement = false;  // spread above the flag tolerance
    double switching_tolerance = 0.0;
    std::optional<ActiveSetPartition> partition;  // filled by the sensitivity module
};

/// Metric projection onto {lower <= u <= upper} intersected with Q.
/// For a ball Q the clamp and the ball scaling alternate until the update
/// falls below 1e-12.
GridField project_box(const GridField& u, const GridField& lower, const GridField& upper,
                      const QSpec& Q = QSpec::whole_space());

/// Projected gradient (Armijo line search, Barzilai-Borwein step seed) for
/// the smooth case; dispatches to the conditional-gradient loop when the
/// instance is in the bang-bang regime or the options demand it.
SolutionRecord solve_control_problem(const ProblemInstance& inst, const PerturbationE& e,
                                     const GridField* init = nullptr,
                                     const SolveOptions& opts = {});

/// Conditional gradient with the switching-law vertex oracle; requires the
/// bang-bang regime (zeta == 0, Q whole-space).
SolutionRecord solve_bang_bang(const ProblemInstance& inst, const PerturbationE& e,
                               const SolveOptions& opts = {}, const GridField* init = nullptr);

/// Picks the solver for the instance regime.
SolutionRecord auto_solve(const ProblemInstance& inst, const PerturbationE& e,
                          const GridField* init = nullptr, const SolveOptions& opts = {});

/// Maximal violation of the first-order variational inequality over
/// bound-vertex test controls: max_u -<g, u - u_bar> >= 0, zero iff the
/// inequality holds exactly.
double verify_first_order(const ProblemInstance& inst, const SolutionRecord& record);

}  // namespace ocstab

#endif
