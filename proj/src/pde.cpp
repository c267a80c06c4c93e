#include "ocstab/pde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ocstab {

EllipticOperator assemble_operator(const GridDomain& d, const CoefficientSpec& spec) {
    EllipticOperator op;
    op.dom_ = d;
    op.spec_ = spec;

    const int nx = d.n[0];
    double lam = std::numeric_limits<double>::infinity();

    if (d.dim == 1) {
        op.xface_.resize(nx + 1);
        for (int k = 0; k <= nx; ++k) {
            const double xm = d.lo[0] + (k + 0.5) * d.h[0];
            op.xface_[k] = spec.eval(0, xm);
            lam = std::min(lam, op.xface_[k]);
        }
    } else {
        const int ny = d.n[1];
        op.xface_.resize(static_cast<size_t>(ny) * (nx + 1));
        op.yface_.resize(static_cast<size_t>(nx) * (ny + 1));
        for (int iy = 0; iy < ny; ++iy)
            for (int k = 0; k <= nx; ++k) {
                const double xm = d.lo[0] + (k + 0.5) * d.h[0];
                const double c = spec.eval(0, xm);
                op.xface_[static_cast<size_t>(iy) * (nx + 1) + k] = c;
                lam = std::min(lam, c);
            }
        for (int ix = 0; ix < nx; ++ix)
            for (int k = 0; k <= ny; ++k) {
                const double ym = d.lo[1] + (k + 0.5) * d.h[1];
                const double c = spec.eval(1, ym);
                op.yface_[static_cast<size_t>(ix) * (ny + 1) + k] = c;
                lam = std::min(lam, c);
            }
    }
    op.lambda_min_ = lam;
    if (!(lam > 0.0))
        throw std::invalid_argument(
            "assemble_operator: sampled ellipticity constant is not positive (lambda_A = " +
            std::to_string(lam) + ")");

    // Diagonal entries.
    op.diag_.assign(static_cast<size_t>(d.node_count()), 0.0);
    if (d.dim == 1) {
        const double ih2 = 1.0 / (d.h[0] * d.h[0]);
        for (int i = 0; i < nx; ++i)
            op.diag_[i] = (op.xface_[i] + op.xface_[i + 1]) * ih2;
    } else {
        const int ny = d.n[1];
        const double ih2x = 1.0 / (d.h[0] * d.h[0]);
        const double ih2y = 1.0 / (d.h[1] * d.h[1]);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const double fx = op.xface_[static_cast<size_t>(iy) * (nx + 1) + ix] +
                                  op.xface_[static_cast<size_t>(iy) * (nx + 1) + ix + 1];
                const double fy = op.yface_[static_cast<size_t>(ix) * (ny + 1) + iy] +
                                  op.yface_[static_cast<size_t>(ix) * (ny + 1) + iy + 1];
                op.diag_[d.index(ix, iy)] = fx * ih2x + fy * ih2y;
            }
    }
    return op;
}

double EllipticOperator::face(int axis, int line, int k) const {
    if (dom_.dim == 1) return xface_[k] / (dom_.h[0] * dom_.h[0]);
    if (axis == 0)
        return xface_[static_cast<size_t>(line) * (dom_.n[0] + 1) + k] / (dom_.h[0] * dom_.h[0]);
    return yface_[static_cast<size_t>(line) * (dom_.n[1] + 1) + k] / (dom_.h[1] * dom_.h[1]);
}

void EllipticOperator::apply(const GridField& y, GridField& out) const {
    if (!(y.domain() == dom_))
        throw std::invalid_argument("EllipticOperator::apply: field lives on a different grid");
    if (out.domain() == dom_) {
        // reuse storage
    } else {
        out = GridField(dom_);
    }
    const int nx = dom_.n[0];
    if (dom_.dim == 1) {
        const double ih2 = 1.0 / (dom_.h[0] * dom_.h[0]);
        for (int i = 0; i < nx; ++i) {
            const double yl = i > 0 ? y[i - 1] : 0.0;
            const double yr = i + 1 < nx ? y[i + 1] : 0.0;
            out[i] = ih2 * (xface_[i] * (y[i] - yl) + xface_[i + 1] * (y[i] - yr));
        }
    } else {
        const int ny = dom_.n[1];
        const double ih2x = 1.0 / (dom_.h[0] * dom_.h[0]);
        const double ih2y = 1.0 / (dom_.h[1] * dom_.h[1]);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const int i = dom_.index(ix, iy);
                const double yl = ix > 0 ? y[dom_.index(ix - 1, iy)] : 0.0;
                const double yr = ix + 1 < nx ? y[dom_.index(ix + 1, iy)] : 0.0;
                const double yd = iy > 0 ? y[dom_.index(ix, iy - 1)] : 0.0;
                const double yu = iy + 1 < ny ? y[dom_.index(ix, iy + 1)] : 0.0;
                const size_t xrow = static_cast<size_t>(iy) * (nx + 1);
                const size_t yrow = static_cast<size_t>(ix) * (ny + 1);
                out[i] = ih2x * (xface_[xrow + ix] * (y[i] - yl) +
                                 xface_[xrow + ix + 1] * (y[i] - yr)) +
                         ih2y * (yface_[yrow + iy] * (y[i] - yd) +
                                 yface_[yrow + iy + 1] * (y[i] - yu));
            }
    }
}

GridField EllipticOperator::apply(const GridField& y) const {
    GridField out(dom_);
    apply(y, out);
    return out;
}

double Nonlinearity::f(double y) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Cubic: return scale * y * y * y;
        case Kind::Sinh: return scale * std::sinh(y);
    }
    return 0.0;
}

double Nonlinearity::fy(double y) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Cubic: return 3.0 * scale * y * y;
        case Kind::Sinh: return scale * std::cosh(y);
    }
    return 0.0;
}

double Nonlinearity::fyy(double y) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Cubic: return 6.0 * scale * y;
        case Kind::Sinh: return scale * std::sinh(y);
    }
    return 0.0;
}

Nonlinearity Nonlinearity::zero() { return {Kind::Zero, 0.0}; }
Nonlinearity Nonlinearity::cubic() { return {Kind::Cubic, 1.0}; }

Nonlinearity Nonlinearity::scaled_cubic(double c) {
    if (c < 0.0) throw std::invalid_argument("Nonlinearity: cubic scale must be >= 0");
    return {Kind::Cubic, c};
}

Nonlinearity Nonlinearity::sinh(double c) {
    if (c < 0.0) throw std::invalid_argument("Nonlinearity: sinh scale must be >= 0");
    return {Kind::Sinh, c};
}

CostIntegrand CostIntegrand::tracking(GridField y_d) {
    CostIntegrand c;
    c.kind = Kind::Tracking;
    c.target = std::move(y_d);
    return c;
}

namespace {

// Thomas algorithm for (A + diag(shift)) x = b on a 1D grid.
GridField tridiagonal_solve(const EllipticOperator& op, const GridField& shift,
                            const GridField& b) {
    const GridDomain& d = op.domain();
    const int n = d.n[0];

    // face() carries the 1/h^2 scaling already.
    std::vector<double> diag(n), lower(n), upper(n), rhs(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = op.diagonal()[i] + shift[i];
        lower[i] = i > 0 ? -op.face(0, 0, i) : 0.0;
        upper[i] = i + 1 < n ? -op.face(0, 0, i + 1) : 0.0;
        rhs[i] = b[i];
    }

    for (int i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    GridField x(d);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

// Jacobi-preconditioned CG for (A + diag(shift)) x = b on a 2D grid.
GridField pcg_solve(const EllipticOperator& op, const GridField& shift, const GridField& b,
                    const PdeSolveOptions& opts, const GridField* x0) {
    const GridDomain& d = op.domain();
    const int n = d.node_count();

    GridField x = x0 ? *x0 : GridField(d);
    GridField r(d), z(d), p(d), ap(d);

    auto apply_shifted = [&](const GridField& v, GridField& out) {
        op.apply(v, out);
        for (int i = 0; i < n; ++i) out[i] += shift[i] * v[i];
    };

    apply_shifted(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) inv_diag[i] = 1.0 / (op.diagonal()[i] + shift[i]);

    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) bnorm += b[i] * b[i];
    bnorm = std::sqrt(bnorm);
    const double tol = opts.linear_rel_tol * bnorm + 1e-300;

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
        rz += r[i] * z[i];
    }
    p = z;

    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
    rnorm = std::sqrt(rnorm);
    if (rnorm <= tol) return x;

    const int max_it = std::min(opts.max_linear_iterations, 50 * n + 100);
    for (int it = 0; it < max_it; ++it) {
        apply_shifted(p, ap);
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0))
            throw std::runtime_error("pcg_solve: curvature breakdown (matrix not SPD?)");
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = 0.0;
        for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
        rnorm = std::sqrt(rnorm);
        if (rnorm <= tol) return x;
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw std::runtime_error("pcg_solve: no convergence within iteration cap, residual " +
                             std::to_string(rnorm));
}

}  // namespace

GridField solve_shifted(const EllipticOperator& op, const GridField& shift, const GridField& b,
                        const PdeSolveOptions& opts, const GridField* x0) {
    if (!(shift.domain() == op.domain()) || !(b.domain() == op.domain()))
        throw std::invalid_argument("solve_shifted: fields live on a different grid");
    if (op.domain().dim == 1) return tridiagonal_solve(op, shift, b);
    return pcg_solve(op, shift, b, opts, x0);
}

StateSolveReport solve_state(const EllipticOperator& op, const Nonlinearity& f,
                             const GridField& rhs, const PdeSolveOptions& opts,
                             const GridField* init) {
    if (!(rhs.domain() == op.domain()))
        throw std::invalid_argument("solve_state: rhs lives on a different grid");
    if (!(opts.newton_tol > 0.0))
        throw std::invalid_argument("solve_state: Newton tolerance must be positive");

    const GridDomain& d = op.domain();
    const int n = d.node_count();

    StateSolveReport rep;
    rep.y = init ? *init : GridField(d);

    GridField res(d), shift(d), delta(d);
    auto residual_of = [&](const GridField& y, GridField& out) {
        op.apply(y, out);
        for (int i = 0; i < n; ++i) out[i] += f.f(y[i]) - rhs[i];
        return norm(out, NormKind::L2);
    };

    double rn = residual_of(rep.y, res);
    for (int it = 0; it < opts.max_newton; ++it) {
        if (rn <= opts.newton_tol) {
            rep.converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) shift[i] = f.fy(rep.y[i]);
        GridField neg(d);
        for (int i = 0; i < n; ++i) neg[i] = -res[i];
        delta = solve_shifted(op, shift, neg, opts, nullptr);

        // Damped update: halve the step while the residual grows.
        double t = 1.0;
        GridField trial(d);
        double rn_new = 0.0;
        GridField tr_res(d);
        for (int halving = 0; halving < 40; ++halving) {
            trial = axpy(rep.y, t, delta);
            rn_new = residual_of(trial, tr_res);
            if (rn_new < rn || rn_new <= opts.newton_tol) break;
            t *= 0.5;
        }
        rep.y = trial;
        res = tr_res;
        rn = rn_new;
        rep.newton_iterations = it + 1;
    }
    if (!rep.converged && rn <= opts.newton_tol) rep.converged = true;
    rep.residual = rn;
    return rep;
}

GridField solve_linearized(const EllipticOperator& op, const GridField& y, const Nonlinearity& f,
                           const GridField& v, const PdeSolveOptions& opts) {
    GridField shift(op.domain());
    for (int i = 0; i < shift.size(); ++i) shift[i] = f.fy(y[i]);
    return solve_shifted(op, shift, v, opts);
}

GridField solve_second_derivative(const EllipticOperator& op, const GridField& y,
                                  const Nonlinearity& f, const GridField& z1, const GridField& z2,
                                  const PdeSolveOptions& opts) {
    GridField shift(op.domain()), rhs(op.domain());
    for (int i = 0; i < shift.size(); ++i) {
        shift[i] = f.fy(y[i]);
        rhs[i] = -f.fyy(y[i]) * z1[i] * z2[i];
    }
    return solve_shifted(op, shift, rhs, opts);
}

GridField solve_adjoint(const EllipticOperator& op, const GridField& y, const Nonlinearity& f,
                        const CostIntegrand& L, const GridField& e_J,
                        const PdeSolveOptions& opts) {
    GridField shift(op.domain()), rhs(op.domain());
    for (int i = 0; i < shift.size(); ++i) {
        shift[i] = f.fy(y[i]);
        rhs[i] = L.Ly(y[i], i) + e_J[i];
    }
    return solve_shifted(op, shift, rhs, opts);
}

}  // namespace ocstab
