#ifndef OCSTAB_VERIFY_HPP
#define OCSTAB_VERIFY_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ocstab/rng.hpp"
#include "ocstab/sensitivity.hpp"

namespace ocstab {

/// Least-squares fit of log(y) = intercept + slope * log(x); points with a
/// nonpositive coordinate are skipped.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct FDOracleConfig {
    std::vector<double> steps{1e-2, 3e-3, 1e-3, 3e-4};
    double tol_pass = 5e-3;
    double solver_tol_factor = 0.1;  // inner re-solves run 10x tighter
    SolveOptions solve;
};

/// Difference quotients of the marginal function along one direction.
/// Infeasible sides are recorded as NaN (one-sided quotients).
struct QuotientLadder {
    std::vector<double> steps;
    std::vector<double> forward;   // (mu(e + t d) - mu(e)) / t
    std::vector<double> backward;  // (mu(e) - mu(e - t d)) / t
    double mu_base = 0.0;
};

QuotientLadder marginal_fd(const ProblemInstance& inst, const PerturbationE& ebase,
                           const PerturbationE& dir, const FDOracleConfig& cfg);

struct DirectionCheck {
    std::string name;
    double pairing = 0.0;
    QuotientLadder ladder;
    std::vector<double> errors;  // per step: |quotient - pairing|, central when two-sided
    std::vector<bool> one_sided;
    double smallest_step_error = 0.0;
    bool pass = false;
};

struct FdCheckReport {
    std::vector<DirectionCheck> directions;
    double tol_pass = 0.0;
    bool all_pass = false;
};

/// Compares the marginal difference quotients against the pairing
/// <e*, d>_E of a subgradient tuple; pass iff the smallest-step error is
/// at most tol_pass * (1 + |pairing|) per direction.
FdCheckReport check_subgradient_fd(const ProblemInstance& inst, const SolutionRecord& record,
                                   const DualE& tuple,
                                   const std::vector<std::pair<std::string, PerturbationE>>& dirs,
                                   const FDOracleConfig& cfg);

struct MeasureFitResult {
    std::vector<double> epsilons;
    std::vector<double> measures;
    double K_hat = 0.0;
    double kappa_hat = 0.0;
    double r_squared = 0.0;
    bool infinite_sentinel = false;  // level sets empty: kappa = +inf
};

/// Level-set measure fit |{ |phi| <= eps }| ~ K * eps^kappa by log-log
/// least squares. A field bounded away from zero yields the +inf sentinel;
/// an identically-flat field is rejected; fewer than 3 nonzero measures is
/// an error.
MeasureFitResult estimate_measure_exponent(const GridField& phi,
                                           const std::vector<double>& eps_ladder);

struct GrowthCheckResult {
    int samples = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    int violations = 0;
    uint64_t seed = 0;
    double kappa_hat = 0.0;
};

/// Samples feasible controls (uniform draws plus targeted bang-bang flips)
/// and checks J'(u_bar)(u - u_bar) >= 0 against the growth denominator
/// ||u - u_bar||_{L1}^{1 + 1/kappa}.
GrowthCheckResult check_growth_condition(const ProblemInstance& inst,
                                         const SolutionRecord& record, double kappa_hat,
                                         int n_samples, uint64_t seed);

struct SscReport {
    int samples = 0;
    double delta_hat = std::numeric_limits<double>::infinity();
    int below_target = 0;
    bool cone_empty = false;
    double tau = 0.0;
    uint64_t seed = 0;
    double refined_delta = std::numeric_limits<double>::infinity();
};

/// Samples the extended critical cone (signs forced on the active sets,
/// zero where |phi| > tau) and reports the minimum Rayleigh quotient
/// J''(v,v) / ||z_v||^2, refined by projected descent from the best sample.
SscReport check_ssc(const ProblemInstance& inst, const SolutionRecord& record, double tau,
                    double delta_target, int n_samples, uint64_t seed,
                    int refine_iterations = 80);

/// Exact cone minimum of the Rayleigh quotient on small grids by
/// enumeration of the sign-orthant faces with dense generalized
/// eigensolves. Guarded to node counts <= 24.
double ssc_eigen_oracle(const ProblemInstance& inst, const SolutionRecord& record, double tau);

struct HolderFitResult {
    std::vector<double> sizes;
    std::vector<double> e_norms;
    std::vector<double> distances;  // ||u_e - u_ebar||_L1
    double exponent = 0.0;
    double constant = 0.0;
    double r_squared = 0.0;
    double predicted_exponent = 0.0;  // min(kappa_hat, 1)
    double sigma = 0.0;               // declared bound gap min(beta+e_beta - alpha-e_alpha)
    bool degenerate = false;
    std::string note;
};

/// Solves along e = ebar + s * family for each ladder size and fits
/// log(distance) against log(||e - ebar||_E).
HolderFitResult holder_stability_experiment(const ProblemInstance& inst,
                                            const PerturbationE& ebase,
                                            const PerturbationE& family,
                                            const std::vector<double>& sizes, double kappa_hat,
                                            const FDOracleConfig& cfg);

struct SweepPoint {
    double size = 0.0;
    double ney = 0.0, neJ = 0.0, nealpha = 0.0, nebeta = 0.0;
    double total = 0.0;
};

struct SweepReport {
    SweepPoint base;
    std::vector<SweepPoint> points;
    bool bounded = false;
};

/// Regular subgradients along a ladder approaching ebar; bounded iff every
/// tuple norm stays below 2x the base norm plus 1.
SweepReport subgradient_boundedness_sweep(const ProblemInstance& inst, const PerturbationE& ebase,
                                          const PerturbationE& family,
                                          const std::vector<double>& sizes,
                                          const FDOracleConfig& cfg);

/// Brute-force normal-cone membership: tests the defining inequality
/// <e*, e - ebar> - <u*, u - ubar> <= tol over random and targeted feasible
/// graph points. Independent of the closed-form decision procedure.
bool normal_cone_oracle(const ProblemInstance& inst, const PerturbationE& ebase,
                        const GridField& ubar, const DualE& estar, const GridField& ustar,
                        int n_random, uint64_t seed, double tol);

/// Seeded candidate generator for the coderivative equivalence experiment:
/// valid tuples from the closed form, or corrupted ones with a violation of
/// at least `margin` in one clause.
struct DualCandidate {
    DualE estar;
    GridField ustar;
    std::string label;
};

DualCandidate random_dual_candidate(const ProblemInstance& inst,
                                    const ActiveSetPartition& partition, const QConeElement& cone,
                                    Rng& rng, bool corrupt, double margin);

}  // namespace ocstab

#endif
