#ifndef OCSTAB_PDE_HPP
#define OCSTAB_PDE_HPP

#include <array>
#include <string>
#include <vector>

#include "ocstab/grid.hpp"

namespace ocstab {

/// Diagonal coefficient catalog for A y = -sum_j d_j(a_j(x) d_j y).
/// Laplace is a_j = 1; Diagonal allows per-axis affine coefficients
/// a_j(x) = base[j] + slope[j] * x_j.
struct CoefficientSpec {
    enum class Kind { Laplace, Diagonal };
    Kind kind = Kind::Laplace;
    std::array<double, 2> base{1.0, 1.0};
    std::array<double, 2> slope{0.0, 0.0};

    double eval(int axis, double coord) const {
        return kind == Kind::Laplace ? 1.0 : base[axis] + slope[axis] * coord;
    }

    static CoefficientSpec laplace() { return {}; }
    static CoefficientSpec diagonal(std::array<double, 2> base,
                                    std::array<double, 2> slope = {0.0, 0.0}) {
        CoefficientSpec c;
        c.kind = Kind::Diagonal;
        c.base = base;
        c.slope = slope;
        return c;
    }
};

/// Assembled second-order elliptic operator over the interior nodes.
/// Conservative face-centered differences keep the matrix symmetric
/// positive definite; the stencil is stored as per-axis face coefficients.
class EllipticOperator {
public:
    const GridDomain& domain() const { return dom_; }
    const CoefficientSpec& coefficients() const { return spec_; }

    /// Sampled ellipticity constant (minimum face coefficient).
    double lambda_min() const { return lambda_min_; }

    /// out = A y (homogeneous Dirichlet boundary).
    void apply(const GridField& y, GridField& out) const;
    GridField apply(const GridField& y) const;

    /// Diagonal of A (for preconditioning and tridiagonal assembly).
    const std::vector<double>& diagonal() const { return diag_; }

    /// Face coefficient between node (i-1) and node i along an axis, scaled
    /// by 1/h^2; index 0 touches the lower boundary.
    double face(int axis, int line, int k) const;

private:
    friend EllipticOperator assemble_operator(const GridDomain&, const CoefficientSpec&);
    GridDomain dom_;
    CoefficientSpec spec_;
    // xface_[iy * (nx+1) + k], k = 0..nx; yface_[ix * (ny+1) + k] in 2D.
    std::vector<double> xface_, yface_;
    std::vector<double> diag_;
    double lambda_min_ = 0.0;
};

/// Rejects coefficients whose sampled ellipticity constant is <= 0.
EllipticOperator assemble_operator(const GridDomain& d, const CoefficientSpec& spec);

/// Catalog of monotone nonlinearities f(x, y) = f(y) with df/dy >= 0.
struct Nonlinearity {
    enum class Kind { Zero, Cubic, Sinh };
    Kind kind = Kind::Zero;
    double scale = 1.0;  // >= 0

    double f(double y) const;
    double fy(double y) const;
    double fyy(double y) const;

    static Nonlinearity zero();
    static Nonlinearity cubic();
    static Nonlinearity scaled_cubic(double c);
    static Nonlinearity sinh(double c = 1.0);
};

/// Cost integrand catalog: zero or tracking L = 1/2 (y - y_d)^2.
struct CostIntegrand {
    enum class Kind { Zero, Tracking };
    Kind kind = Kind::Zero;
    GridField target;

    double L(double y, int node) const {
        if (kind == Kind::Zero) return 0.0;
        const double r = y - target[node];
        return 0.5 * r * r;
    }
    double Ly(double y, int node) const {
        return kind == Kind::Zero ? 0.0 : y - target[node];
    }
    double Lyy(double, int) const { return kind == Kind::Zero ? 0.0 : 1.0; }

    static CostIntegrand zero() { return {}; }
    static CostIntegrand tracking(GridField y_d);
};

struct PdeSolveOptions {
    double newton_tol = 1e-11;      // absolute residual tolerance, L2 quadrature norm
    int max_newton = 50;
    double linear_rel_tol = 1e-12;  // CG relative tolerance (2D); 1D solves are direct
    int max_linear_iterations = 100000;
};

struct StateSolveReport {
    GridField y;
    int newton_iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Newton solve of A y + f(y) = rhs with damped steps. Non-convergence is
/// reported in the flag, never silently dropped.
StateSolveReport solve_state(const EllipticOperator& op, const Nonlinearity& f,
                             const GridField& rhs, const PdeSolveOptions& opts = {},
                             const GridField* init = nullptr);

/// (A + diag(fy(y))) z = v.
GridField solve_linearized(const EllipticOperator& op, const GridField& y,
                           const Nonlinearity& f, const GridField& v,
                           const PdeSolveOptions& opts = {});

/// (A + diag(fy(y))) w = -fyy(y) z1 z2.
GridField solve_second_derivative(const EllipticOperator& op, const GridField& y,
                                  const Nonlinearity& f, const GridField& z1,
                                  const GridField& z2, const PdeSolveOptions& opts = {});

/// (A^T + diag(fy(y))) phi = L_y(y) + e_J; A is symmetric so A^T = A.
GridField solve_adjoint(const EllipticOperator& op, const GridField& y,
                        const Nonlinearity& f, const CostIntegrand& L,
                        const GridField& e_J, const PdeSolveOptions& opts = {});

/// Core linear solve (A + diag(shift)) x = b; direct tridiagonal in 1D,
/// Jacobi-preconditioned CG in 2D. Throws on CG breakdown.
GridField solve_shifted(const EllipticOperator& op, const GridField& shift,
                        const GridField& b, const PdeSolveOptions& opts = {},
                        const GridField* x0 = nullptr);

}  // namespace ocstab

#endif
