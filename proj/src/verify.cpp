#include "ocstab/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocstab {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    LogLogFit fit;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    fit.points = static_cast<int>(lx.size());
    if (fit.points < 2) return fit;

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= fit.points;
    my /= fit.points;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (int i = 0; i < fit.points; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

namespace {

bool bounds_feasible(const ProblemInstance& inst, const PerturbationE& e) {
    for (int i = 0; i < inst.alpha.size(); ++i)
        if (inst.alpha[i] + e.ealpha[i] > inst.beta[i] + e.ebeta[i]) return false;
    return true;
}

SolveOptions tightened(const FDOracleConfig& cfg) {
    SolveOptions o = cfg.solve;
    o.stationarity_tol *= cfg.solver_tol_factor;
    return o;
}

}  // namespace

QuotientLadder marginal_fd(const ProblemInstance& inst, const PerturbationE& ebase,
                           const PerturbationE& dir, const FDOracleConfig& cfg) {
    for (size_t i = 0; i + 1 < cfg.steps.size(); ++i)
        if (!(cfg.steps[i] > cfg.steps[i + 1]) || !(cfg.steps[i + 1] > 0.0))
            throw std::invalid_argument("marginal_fd: steps must be positive and decreasing");

    const SolveOptions inner = tightened(cfg);
    const SolutionRecord base = auto_solve(inst, ebase, nullptr, inner);
    if (!base.converged) throw std::runtime_error("marginal_fd: base solve did not converge");

    QuotientLadder lad;
    lad.steps = cfg.steps;
    lad.mu_base = base.value;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    bool any_feasible = false;
    for (double t : cfg.steps) {
        double fwd = nan, bwd = nan;
        const PerturbationE ep = perturbation_axpy(ebase, t, dir);
        if (bounds_feasible(inst, ep)) {
            const SolutionRecord rp = auto_solve(inst, ep, &base.control, inner);
            if (!rp.converged) throw std::runtime_error("marginal_fd: re-solve did not converge");
            fwd = (rp.value - base.value) / t;
            any_feasible = true;
        }
        const PerturbationE em = perturbation_axpy(ebase, -t, dir);
        if (bounds_feasible(inst, em)) {
            const SolutionRecord rm = auto_solve(inst, em, &base.control, inner);
            if (!rm.converged) throw std::runtime_error("marginal_fd: re-solve did not converge");
            bwd = (base.value - rm.value) / t;
            any_feasible = true;
        }
        lad.forward.push_back(fwd);
        lad.backward.push_back(bwd);
    }
    if (!any_feasible)
        throw std::invalid_argument("marginal_fd: perturbed bounds infeasible on both sides");
    return lad;
}

FdCheckReport check_subgradient_fd(const ProblemInstance& inst, const SolutionRecord& record,
                                   const DualE& tuple,
                                   const std::vector<std::pair<std::string, PerturbationE>>& dirs,
                                   const FDOracleConfig& cfg) {
    FdCheckReport rep;
    rep.tol_pass = cfg.tol_pass;
    rep.all_pass = true;

    for (const auto& [name, d] : dirs) {
        DirectionCheck chk;
        chk.name = name;
        chk.pairing = pair_dual(tuple, d);
        chk.ladder = marginal_fd(inst, record.e, d, cfg);
        for (size_t k = 0; k < chk.ladder.steps.size(); ++k) {
            const double f = chk.ladder.forward[k];
            const double b = chk.ladder.backward[k];
            double q;
            bool one_sided = false;
            if (std::isnan(f)) {
                q = b;
                one_sided = true;
            } else if (std::isnan(b)) {
                q = f;
                one_sided = true;
            } else {
                q = 0.5 * (f + b);  // central quotient
            }
            chk.errors.push_back(std::abs(q - chk.pairing));
            chk.one_sided.push_back(one_sided);
        }
        chk.smallest_step_error = chk.errors.back();
        chk.pass = chk.smallest_step_error <= cfg.tol_pass * (1.0 + std::abs(chk.pairing));
        rep.all_pass = rep.all_pass && chk.pass;
        rep.directions.push_back(std::move(chk));
    }
    return rep;
}

MeasureFitResult estimate_measure_exponent(const GridField& phi,
                                           const std::vector<double>& eps_ladder) {
    if (eps_ladder.empty())
        throw std::invalid_argument("estimate_measure_exponent: empty epsilon ladder");
    for (double e : eps_ladder)
        if (!(e > 0.0))
            throw std::invalid_argument("estimate_measure_exponent: epsilons must be positive");

    double phi_min = std::numeric_limits<double>::infinity(), phi_max = 0.0;
    for (int i = 0; i < phi.size(); ++i) {
        phi_min = std::min(phi_min, std::abs(phi[i]));
        phi_max = std::max(phi_max, std::abs(phi[i]));
    }
    const double eps_lo = *std::min_element(eps_ladder.begin(), eps_ladder.end());
    const double eps_hi = *std::max_element(eps_ladder.begin(), eps_ladder.end());

    if (phi_max <= eps_lo)
        throw std::invalid_argument(
            "estimate_measure_exponent: field is identically below the smallest epsilon "
            "(degenerate flat case)");

    MeasureFitResult res;
    res.epsilons = eps_ladder;
    for (double eps : eps_ladder) {
        size_t count = 0;
        for (int i = 0; i < phi.size(); ++i)
            if (std::abs(phi[i]) <= eps) ++count;
        res.measures.push_back(set_measure(phi.domain(), count));
    }

    if (phi_min > eps_hi) {  // level sets empty on the whole ladder
        res.infinite_sentinel = true;
        res.kappa_hat = std::numeric_limits<double>::infinity();
        res.K_hat = 0.0;
        return res;
    }

    int nonzero = 0;
    for (double m : res.measures)
        if (m > 0.0) ++nonzero;
    if (nonzero < 3)
        throw std::runtime_error(
            "estimate_measure_exponent: fewer than 3 epsilon values with nonzero measure");

    const LogLogFit fit = fit_loglog(res.epsilons, res.measures);
    res.kappa_hat = fit.slope;
    res.K_hat = std::exp(fit.intercept);
    res.r_squared = fit.r_squared;
    return res;
}

GrowthCheckResult check_growth_condition(const ProblemInstance& inst,
                                         const SolutionRecord& record, double kappa_hat,
                                         int n_samples, uint64_t seed) {
    if (!(kappa_hat > 0.0))
        throw std::invalid_argument("check_growth_condition: kappa_hat must be positive");

    GrowthCheckResult res;
    res.seed = seed;
    res.kappa_hat = kappa_hat;
    Rng rng(seed);

    const GridField lower = inst.alpha + record.e.ealpha;
    const GridField upper = inst.beta + record.e.ebeta;
    GridField g = record.phi;
    for (int i = 0; i < g.size(); ++i)
        g[i] += inst.zeta[i] * (record.control[i] + record.e.ey[i]);

    const double expo = 1.0 + 1.0 / kappa_hat;
    const int n = record.control.size();

    for (int s = 0; s < n_samples; ++s) {
        GridField u = record.control;
        if (s % 2 == 0) {
            for (int i = 0; i < n; ++i) u[i] = rng.uniform(lower[i], upper[i]);
        } else {
            // Targeted flips of the bang-bang pattern on a random subset.
            const int flips = 1 + static_cast<int>(rng.below(std::max(1, n / 4)));
            for (int k = 0; k < flips; ++k) {
                const int i = static_cast<int>(rng.below(n));
                const double mid = 0.5 * (lower[i] + upper[i]);
                u[i] = record.control[i] > mid ? lower[i] : upper[i];
            }
        }
        const GridField du = u - record.control;
        const double dist = norm(du, NormKind::L1);
        if (dist == 0.0) continue;  // zero denominator
        const double ratio = inner(g, du) / std::pow(dist, expo);
        res.min_ratio = std::min(res.min_ratio, ratio);
        if (ratio < -1e-10) ++res.violations;
        ++res.samples;
    }
    return res;
}

namespace {

struct SscWorkspace {
    const ProblemInstance& inst;
    const SolutionRecord& record;
    double tau;
    std::vector<int8_t> sign;  // +1 force >=0, -1 force <=0, 0 free, 9 forced zero

    explicit SscWorkspace(const ProblemInstance& i, const SolutionRecord& r, double t)
        : inst(i), record(r), tau(t) {
        const ActiveSetPartition part = partition_active_sets(inst, record.e, record.control);
        sign.resize(record.control.size(), 0);
        for (int k = 0; k < record.control.size(); ++k) {
            if (std::abs(record.phi[k]) > tau)
                sign[k] = 9;
            else if (part.is_lower(k))
                sign[k] = 1;
            else if (part.is_upper(k))
                sign[k] = -1;
        }
    }

    bool cone_trivial() const {
        for (int8_t s : sign)
            if (s != 9) return false;
        return true;
    }

    void project(GridField& v) const {
        for (int i = 0; i < v.size(); ++i) {
            if (sign[i] == 9)
                v[i] = 0.0;
            else if (sign[i] == 1)
                v[i] = std::max(0.0, v[i]);
            else if (sign[i] == -1)
                v[i] = std::min(0.0, v[i]);
        }
    }

    // Rayleigh quotient J''(v,v) / ||z_v||^2; returns false when z = 0.
    bool quotient(const GridField& v, double& out, GridField* z_out = nullptr) const {
        const GridField z = solve_linearized(inst.op, record.y, inst.f, v, inst.pde);
        const double den = inner(z, z);
        if (den <= 0.0) return false;
        double num = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            num += inst.L.Lyy(record.y[i], i) * z[i] * z[i];
            num += inst.zeta[i] * v[i] * v[i];
            num -= record.phi[i] * inst.f.fyy(record.y[i]) * z[i] * z[i];
        }
        out = inst.domain.cell_volume() * num / den;
        if (z_out) *z_out = z;
        return true;
    }

    // H v and M v in the nodal representation (K symmetric).
    void apply_HM(const GridField& v, GridField& Hv, GridField& Mv) const {
        const double vol = inst.domain.cell_volume();
        const GridField z = solve_linearized(inst.op, record.y, inst.f, v, inst.pde);
        GridField dz(inst.domain), zv(inst.domain);
        for (int i = 0; i < z.size(); ++i) {
            dz[i] = (inst.L.Lyy(record.y[i], i) - record.phi[i] * inst.f.fyy(record.y[i])) * z[i];
            zv[i] = z[i];
        }
        const GridField s1 = solve_linearized(inst.op, record.y, inst.f, dz, inst.pde);
        const GridField s2 = solve_linearized(inst.op, record.y, inst.f, zv, inst.pde);
        Hv = GridField(inst.domain);
        Mv = GridField(inst.domain);
        for (int i = 0; i < v.size(); ++i) {
            Hv[i] = vol * (s1[i] + inst.zeta[i] * v[i]);
            Mv[i] = vol * s2[i];
        }
    }
};

}  // namespace

SscReport check_ssc(const ProblemInstance& inst, const SolutionRecord& record, double tau,
                    double delta_target, int n_samples, uint64_t seed, int refine_iterations) {
    SscReport rep;
    rep.tau = tau;
    rep.seed = seed;
    SscWorkspace ws(inst, record, tau);
    if (ws.cone_trivial()) {
        rep.cone_empty = true;
        return rep;
    }

    Rng rng(seed);
    GridField best(inst.domain);
    for (int s = 0; s < n_samples; ++s) {
        GridField v(inst.domain);
        for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
        ws.project(v);
        double q;
        if (!ws.quotient(v, q)) continue;
        if (q < rep.delta_hat) {
            rep.delta_hat = q;
            best = v;
        }
        if (q < delta_target) ++rep.below_target;
        ++rep.samples;
    }
    if (rep.samples == 0) {
        rep.cone_empty = true;
        return rep;
    }

    // Projected descent on the Rayleigh quotient, started from the best
    // sample; every accepted iterate is itself a cone sample.
    GridField v = best;
    double q = rep.delta_hat;
    for (int it = 0; it < refine_iterations; ++it) {
        GridField Hv(inst.domain), Mv(inst.domain);
        ws.apply_HM(v, Hv, Mv);
        const double vMv = inner(v, Mv) / inst.domain.cell_volume();
        GridField grad(inst.domain);
        for (int i = 0; i < v.size(); ++i) grad[i] = 2.0 * (Hv[i] - q * Mv[i]);
        const double gn = norm(grad, NormKind::Linf);
        if (!(gn > 0.0) || !(vMv > 0.0)) break;

        double t = norm(v, NormKind::Linf) / gn;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            GridField trial = axpy(v, -t, grad);
            ws.project(trial);
            const double tn = norm(trial, NormKind::Linf);
            if (tn > 0.0) {
                trial *= 1.0 / tn;
                double tq;
                if (ws.quotient(trial, tq) && tq < q - 1e-15 * (1.0 + std::abs(q))) {
                    v = trial;
                    q = tq;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!improved) break;
    }
    rep.refined_delta = q;
    if (q < rep.delta_hat) {
        rep.delta_hat = q;
        if (q < delta_target) ++rep.below_target;
        ++rep.samples;
    }
    return rep;
}

double ssc_eigen_oracle(const ProblemInstance& inst, const SolutionRecord& record, double tau) {
    const int n = inst.domain.node_count();
    if (n > 24)
        throw std::invalid_argument("ssc_eigen_oracle: grid too large for face enumeration");

    SscWorkspace ws(inst, record, tau);
    if (ws.cone_trivial())
        throw std::invalid_argument("ssc_eigen_oracle: cone contains only the origin");

    // Dense H and M assembled column by column from unit vectors.
    Eigen::MatrixXd H(n, n), M(n, n);
    for (int j = 0; j < n; ++j) {
        GridField ej(inst.domain);
        ej[j] = 1.0;
        GridField Hj(inst.domain), Mj(inst.domain);
        ws.apply_HM(ej, Hj, Mj);
        for (int i = 0; i < n; ++i) {
            H(i, j) = Hj[i];
            M(i, j) = Mj[i];
        }
    }
    H = 0.5 * (H + H.transpose()).eval();
    M = 0.5 * (M + M.transpose()).eval();

    std::vector<int> free_idx, constrained;
    for (int i = 0; i < n; ++i) {
        if (ws.sign[i] == 0) free_idx.push_back(i);
        if (ws.sign[i] == 1 || ws.sign[i] == -1) constrained.push_back(i);
    }
    const size_t m = constrained.size();
    if (m > 16) throw std::invalid_argument("ssc_eigen_oracle: too many sign-constrained nodes");

    double best = std::numeric_limits<double>::infinity();
    for (size_t bits = 0; bits < (1ull << m); ++bits) {
        std::vector<int> idx = free_idx;
        for (size_t k = 0; k < m; ++k)
            if (bits & (1ull << k)) idx.push_back(constrained[k]);
        if (idx.empty()) continue;
        const int d = static_cast<int>(idx.size());

        Eigen::MatrixXd Hs(d, d), Ms(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                Hs(a, b) = H(idx[a], idx[b]);
                Ms(a, b) = M(idx[a], idx[b]);
            }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs, Ms);
        if (es.info() != Eigen::Success) continue;

        for (int k = 0; k < d; ++k) {
            const double lam = es.eigenvalues()(k);
            if (lam >= best) continue;
            const Eigen::VectorXd vec = es.eigenvectors().col(k);
            // Accept the eigenvector (or its negative) if it satisfies the
            // sign pattern of the constrained coordinates in this face.
            for (double orient : {1.0, -1.0}) {
                bool ok = true;
                const double scale = vec.cwiseAbs().maxCoeff();
                for (int a = 0; a < d && ok; ++a) {
                    const int node = idx[a];
                    const double val = orient * vec(a);
                    if (ws.sign[node] == 1 && val < -1e-9 * scale) ok = false;
                    if (ws.sign[node] == -1 && val > 1e-9 * scale) ok = false;
                }
                if (ok) {
                    best = lam;
                    break;
                }
            }
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("ssc_eigen_oracle: no sign-feasible eigenvector found");
    return best;
}

HolderFitResult holder_stability_experiment(const ProblemInstance& inst,
                                            const PerturbationE& ebase,
                                            const PerturbationE& family,
                                            const std::vector<double>& sizes, double kappa_hat,
                                            const FDOracleConfig& cfg) {
    HolderFitResult res;
    res.predicted_exponent = std::min(kappa_hat, 1.0);

    // Declared gap of the base feasible set; ladders reaching past sigma/8
    // leave the regime where the stability estimate is guaranteed.
    res.sigma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.alpha.size(); ++i)
        res.sigma = std::min(res.sigma, inst.beta[i] + ebase.ebeta[i] - inst.alpha[i] -
                                            ebase.ealpha[i]);

    const double family_norm = norm_E(family);
    if (family_norm <= 0.0) {
        res.degenerate = true;
        res.note = "degenerate family: zero direction";
        return res;
    }
    double max_norm = 0.0;
    for (double s : sizes) max_norm = std::max(max_norm, s * family_norm);
    if (max_norm > res.sigma / 8.0)
        res.note = "ladder exceeds sigma/8; largest perturbation " +
                   std::to_string(max_norm) + " vs sigma " + std::to_string(res.sigma);

    const SolveOptions inner = tightened(cfg);
    const SolutionRecord base = auto_solve(inst, ebase, nullptr, inner);
    if (!base.converged)
        throw std::runtime_error("holder_stability_experiment: base solve did not converge");

    for (double s : sizes) {
        const PerturbationE e = perturbation_axpy(ebase, s, family);
        if (!bounds_feasible(inst, e))
            throw std::runtime_error("holder_stability_experiment: ladder leaves the feasible set");
        const SolutionRecord rec = auto_solve(inst, e, &base.control, inner);
        if (!rec.converged)
            throw std::runtime_error("holder_stability_experiment: re-solve did not converge");
        res.sizes.push_back(s);
        res.e_norms.push_back(s * family_norm);
        res.distances.push_back(norm(rec.control - base.control, NormKind::L1));
    }

    int positive = 0;
    for (double d : res.distances)
        if (d > 0.0) ++positive;
    if (positive < 3) {
        res.degenerate = true;
        res.note = "degenerate family: distances vanish along the ladder";
        return res;
    }

    const LogLogFit fit = fit_loglog(res.e_norms, res.distances);
    res.exponent = fit.slope;
    res.constant = std::exp(fit.intercept);
    res.r_squared = fit.r_squared;
    return res;
}

SweepReport subgradient_boundedness_sweep(const ProblemInstance& inst, const PerturbationE& ebase,
                                          const PerturbationE& family,
                                          const std::vector<double>& sizes,
                                          const FDOracleConfig& cfg) {
    auto tuple_norms = [](const SubgradientE& s, double size) {
        SweepPoint p;
        p.size = size;
        p.ney = norm(s.tuple.ey, NormKind::L2);
        p.neJ = norm(s.tuple.eJ, NormKind::L2);
        p.nealpha = norm(s.tuple.ealpha, NormKind::L2);
        p.nebeta = norm(s.tuple.ebeta, NormKind::L2);
        p.total = p.ney + p.neJ + p.nealpha + p.nebeta;
        return p;
    };

    const SolveOptions inner = tightened(cfg);
    SweepReport rep;
    const SolutionRecord base = auto_solve(inst, ebase, nullptr, inner);
    if (!base.converged)
        throw std::runtime_error("subgradient_boundedness_sweep: base solve did not converge");
    rep.base = tuple_norms(regular_subgradient(inst, base), 0.0);

    rep.bounded = true;
    for (double s : sizes) {
        const PerturbationE e = perturbation_axpy(ebase, s, family);
        const SolutionRecord rec = auto_solve(inst, e, &base.control, inner);
        if (!rec.converged)
            throw std::runtime_error("subgradient_boundedness_sweep: re-solve did not converge");
        const SweepPoint p = tuple_norms(regular_subgradient(inst, rec), s);
        if (p.total > 2.0 * rep.base.total + 1.0) rep.bounded = false;
        rep.points.push_back(p);
    }
    return rep;
}

bool normal_cone_oracle(const ProblemInstance& inst, const PerturbationE& ebase,
                        const GridField& ubar, const DualE& estar, const GridField& ustar,
                        int n_random, uint64_t seed, double tol) {
    const GridField lower = inst.alpha + ebase.ealpha;
    const GridField upper = inst.beta + ebase.ebeta;
    const int n = ubar.size();

    // <e*, de> - <u*, u - ubar> <= tol * scale must hold for every feasible
    // graph displacement; a single violation refutes membership.
    auto violated = [&](const GridField& dea, const GridField& deb, const GridField& dey,
                        const GridField& deJ, const GridField& u) {
        double lhs = inner(estar.ealpha, dea) + inner(estar.ebeta, deb) +
                     inner(estar.ey, dey) + inner(estar.eJ, deJ) - inner(ustar, u - ubar);
        double scale = norm(dea, NormKind::L2) + norm(deb, NormKind::L2) +
                       norm(dey, NormKind::L2) + norm(deJ, NormKind::L2) +
                       norm(u - ubar, NormKind::L2);
        return lhs > tol * (scale + 1e-30);
    };

    const GridField zero(inst.domain);
    const double c = 0.25 * inst.bound_scale();

    auto control_feasible = [&](const GridField& u) {
        if (inst.Q.kind == QSpec::Kind::Ball && norm(u, NormKind::L2) > inst.Q.radius + 1e-14)
            return false;
        return true;
    };

    // Targeted single-node probes: they discriminate every clause of the
    // closed-form conditions.
    for (int i = 0; i < n; ++i) {
        GridField d(inst.domain);

        d[i] = c;
        if (violated(zero, zero, d, zero, ubar)) return false;
        if (violated(zero, zero, zero, d, ubar)) return false;
        d[i] = -c;
        if (violated(zero, zero, d, zero, ubar)) return false;
        if (violated(zero, zero, zero, d, ubar)) return false;

        // Relax the lower bound (always feasible), tighten where possible.
        d[i] = -c;
        if (violated(d, zero, zero, zero, ubar)) return false;
        const double room_lo = ubar[i] - lower[i];
        if (room_lo > 0.0) {
            d[i] = 0.5 * std::min(c, room_lo);
            if (violated(d, zero, zero, zero, ubar)) return false;
        }

        // Relax the upper bound, tighten where possible.
        d[i] = c;
        if (violated(zero, d, zero, zero, ubar)) return false;
        const double room_hi = upper[i] - ubar[i];
        if (room_hi > 0.0) {
            d[i] = -0.5 * std::min(c, room_hi);
            if (violated(zero, d, zero, zero, ubar)) return false;
        }

        // Move the control inside the box.
        if (room_hi > 0.0) {
            GridField u = ubar;
            u[i] += 0.5 * std::min(c, room_hi);
            if (control_feasible(u) && violated(zero, zero, zero, zero, u)) return false;
        }
        if (room_lo > 0.0) {
            GridField u = ubar;
            u[i] -= 0.5 * std::min(c, room_lo);
            if (control_feasible(u) && violated(zero, zero, zero, zero, u)) return false;
        }

        // Bound and control move together: these stay in the graph for any
        // step and discriminate the u* decomposition at active nodes.
        for (double t : {c, -c}) {
            GridField u = ubar;
            u[i] += t;
            if (u[i] >= lower[i] + t && u[i] <= upper[i] && control_feasible(u)) {
                d = GridField(inst.domain);
                d[i] = t;
                if (violated(d, zero, zero, zero, u)) return false;
            }
            u = ubar;
            u[i] += t;
            if (u[i] >= lower[i] && u[i] <= upper[i] + t && control_feasible(u)) {
                d = GridField(inst.domain);
                d[i] = t;
                if (violated(zero, d, zero, zero, u)) return false;
            }
        }
    }

    if (inst.Q.kind == QSpec::Kind::Ball) {
        // Shrink toward the origin and scaled pushes, projected back.
        for (double t : {0.5, 0.1, 0.01}) {
            GridField u = project_box((1.0 - t) * ubar, lower, upper, inst.Q);
            if (violated(zero, zero, zero, zero, u)) return false;
        }
    }

    Rng rng(seed);
    for (int s = 0; s < n_random; ++s) {
        GridField dea(inst.domain), deb(inst.domain), dey(inst.domain), deJ(inst.domain);
        for (int i = 0; i < n; ++i) {
            dea[i] = c * rng.uniform(-1.0, 1.0);
            deb[i] = c * rng.uniform(-1.0, 1.0);
            dey[i] = c * rng.uniform(-1.0, 1.0);
            deJ[i] = c * rng.uniform(-1.0, 1.0);
        }
        GridField lo2 = lower + dea, hi2 = upper + deb;
        bool feas = true;
        for (int i = 0; i < n; ++i)
            if (lo2[i] > hi2[i]) feas = false;
        if (!feas) continue;
        GridField u(inst.domain);
        for (int i = 0; i < n; ++i) u[i] = rng.uniform(lo2[i], hi2[i]);
        u = project_box(u, lo2, hi2, inst.Q);
        if (violated(dea, deb, dey, deJ, u)) return false;
    }
    return true;
}

DualCandidate random_dual_candidate(const ProblemInstance& inst,
                                    const ActiveSetPartition& partition, const QConeElement& cone,
                                    Rng& rng, bool corrupt, double margin) {
    const GridDomain& d = inst.domain;
    DualCandidate c;
    c.estar.ey = GridField(d);
    c.estar.eJ = GridField(d);
    c.estar.ealpha = GridField(d);
    c.estar.ebeta = GridField(d);

    for (int i : partition.lower) c.estar.ealpha[i] = rng.uniform(0.0, 1.0);
    for (int i : partition.upper) c.estar.ebeta[i] = -rng.uniform(0.0, 1.0);

    double lambda = 0.0;
    GridField u2(d);
    if (cone.tag == QConeElement::Tag::Ray && rng.uniform() < 0.5) {
        lambda = rng.uniform(0.0, 1.0);
        u2 = lambda * cone.ray_direction;
    }
    c.ustar = c.estar.ealpha + c.estar.ebeta - u2;
    c.label = "valid";

    if (!corrupt) return c;

    const int n = d.node_count();
    std::vector<int> off_lower;
    for (int i = 0; i < n; ++i)
        if (!partition.is_lower(i)) off_lower.push_back(i);

    // Pick an applicable corruption; ey/eJ/ustar are always applicable.
    std::vector<int> kinds{0, 1, 4};
    if (!partition.lower.empty()) kinds.push_back(2);
    if (!off_lower.empty()) kinds.push_back(3);
    switch (kinds[rng.below(kinds.size())]) {
        case 0:
            c.estar.ey[static_cast<int>(rng.below(n))] = margin * (rng.uniform() < 0.5 ? 1 : -1);
            c.label = "corrupt:ey_nonzero";
            break;
        case 1:
            c.estar.eJ[static_cast<int>(rng.below(n))] = margin * (rng.uniform() < 0.5 ? 1 : -1);
            c.label = "corrupt:eJ_nonzero";
            break;
        case 2: {
            const int i = partition.lower[rng.below(partition.lower.size())];
            c.estar.ealpha[i] = -margin;
            c.ustar = c.estar.ealpha + c.estar.ebeta - u2;
            c.label = "corrupt:alpha_sign";
            break;
        }
        case 3: {
            c.estar.ealpha[off_lower[rng.below(off_lower.size())]] = margin;
            c.ustar = c.estar.ealpha + c.estar.ebeta - u2;
            c.label = "corrupt:alpha_support";
            break;
        }
        default:
            c.ustar[static_cast<int>(rng.below(n))] += margin;
            c.label = "corrupt:ustar_decomposition";
            break;
    }
    return c;
}

}  // namespace ocstab
