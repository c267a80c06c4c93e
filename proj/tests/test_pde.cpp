#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ocstab/pde.hpp"
#include "ocstab/rng.hpp"
#include "oracle_helpers.hpp"

using namespace ocstab;
using ocstab::testing::dense_solve;

namespace {
constexpr double kPi = 3.14159265358979323846;

GridField unit(const GridDomain& d, int j) {
    GridField e(d);
    e[j] = 1.0;
    return e;
}
}  // namespace

TEST_CASE("1D Laplace stencil entries") {
    const GridDomain d = make_grid(0.0, 1.0, 3);  // h = 0.25
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const GridField col = op.apply(unit(d, 1));
    CHECK(col[1] == doctest::Approx(32.0));
    CHECK(col[0] == doctest::Approx(-16.0));
    CHECK(col[2] == doctest::Approx(-16.0));
    CHECK(op.lambda_min() == doctest::Approx(1.0));
}

TEST_CASE("2D 5-point stencil: diagonal and symmetry") {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 1}}, {4, 5});
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const double want = 2.0 / (d.h[0] * d.h[0]) + 2.0 / (d.h[1] * d.h[1]);
    for (double v : op.diagonal()) CHECK(v == doctest::Approx(want));

    const int n = d.node_count();
    const Eigen::MatrixXd A = ocstab::testing::dense_matrix(op, GridField(d));
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < n; ++i) CHECK(A.row(i).sum() >= -1e-9);
}

TEST_CASE("constant diagonal coefficient scales the Laplacian") {
    const GridDomain d = make_grid(0.0, 1.0, 8);
    const EllipticOperator lap = assemble_operator(d, CoefficientSpec::laplace());
    const EllipticOperator two = assemble_operator(d, CoefficientSpec::diagonal({2.0, 2.0}));
    Rng rng(3);
    GridField y(d);
    for (int i = 0; i < y.size(); ++i) y[i] = rng.normal();
    const GridField a = lap.apply(y), b = two.apply(y);
    for (int i = 0; i < y.size(); ++i) CHECK(b[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-13));
}

TEST_CASE("ellipticity violation is rejected") {
    const GridDomain d = make_grid(0.0, 1.0, 5);
    CHECK_THROWS_AS(assemble_operator(d, CoefficientSpec::diagonal({-1.0, 1.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_operator(d, CoefficientSpec::diagonal({0.2, 0.2}, {-1.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("solve_state: linear manufactured solution, O(h^2)") {
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        const GridDomain d = make_grid(0.0, 1.0, n);
        const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
        const GridField rhs =
            sample(d, [](double x, double) { return kPi * kPi * std::sin(kPi * x); });
        const StateSolveReport rep = solve_state(op, Nonlinearity::zero(), rhs);
        REQUIRE(rep.converged);
        const GridField exact = sample(d, [](double x, double) { return std::sin(kPi * x); });
        errs.push_back(norm(rep.y - exact, NormKind::Linf));
    }
    for (size_t k = 1; k < errs.size(); ++k) {
        const double order = std::log2(errs[k - 1] / errs[k]);
        CHECK(order > 1.8);
        CHECK(order < 2.2);
    }
}

TEST_CASE("solve_state: zero rhs gives the zero solution for monotone f") {
    const GridDomain d = make_grid(0.0, 1.0, 21);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    for (auto f : {Nonlinearity::cubic(), Nonlinearity::sinh(), Nonlinearity::scaled_cubic(4.0)}) {
        const StateSolveReport rep = solve_state(op, f, GridField(d));
        REQUIRE(rep.converged);
        CHECK(norm(rep.y, NormKind::Linf) <= 1e-11);
    }
}

TEST_CASE("solve_state: semilinear manufactured solution") {
    const GridDomain d = make_grid(0.0, 1.0, 64);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const GridField rhs = sample(d, [](double x, double) {
        const double s = std::sin(kPi * x);
        return kPi * kPi * s + s * s * s;
    });
    const StateSolveReport rep = solve_state(op, Nonlinearity::cubic(), rhs);
    REQUIRE(rep.converged);
    const GridField exact = sample(d, [](double x, double) { return std::sin(kPi * x); });
    CHECK(norm(rep.y - exact, NormKind::Linf) < 5e-3);
}

TEST_CASE("solve_state: solution independent of initialization") {
    const GridDomain d = make_grid(0.0, 1.0, 33);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const GridField rhs = sample(d, [](double x, double) { return 4.0 * x * (1.0 - x); });
    const StateSolveReport a = solve_state(op, Nonlinearity::cubic(), rhs);
    GridField init(d, 3.0);
    const StateSolveReport b = solve_state(op, Nonlinearity::cubic(), rhs, {}, &init);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(norm(a.y - b.y, NormKind::Linf) < 1e-9);
}

TEST_CASE("solve_state reports non-convergence instead of returning silently") {
    const GridDomain d = make_grid(0.0, 1.0, 16);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    PdeSolveOptions opts;
    opts.max_newton = 1;
    const GridField rhs(d, 50.0);
    const StateSolveReport rep = solve_state(op, Nonlinearity::sinh(5.0), rhs, opts);
    CHECK_FALSE(rep.converged);
    CHECK(rep.residual > opts.newton_tol);
}

TEST_CASE("solve_linearized: trivial cases and dense oracle") {
    const GridDomain d = make_grid(0.0, 1.0, 14);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const Nonlinearity f0 = Nonlinearity::zero();
    const GridField y0(d);

    CHECK(norm(solve_linearized(op, y0, f0, GridField(d)), NormKind::Linf) == 0.0);

    Rng rng(11);
    GridField v(d);
    for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
    const GridField z = solve_linearized(op, y0, f0, v);
    const GridField z_dense = dense_solve(op, GridField(d), v);
    CHECK(norm(z - z_dense, NormKind::Linf) < 1e-10);
}

TEST_CASE("solve_linearized is linear in v") {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 1}}, {7, 7});
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const GridField y = sample(d, [](double x, double yy) { return x * yy; });
    const Nonlinearity f = Nonlinearity::cubic();
    Rng rng(5);
    GridField v1(d), v2(d);
    for (int i = 0; i < v1.size(); ++i) {
        v1[i] = rng.normal();
        v2[i] = rng.normal();
    }
    const GridField lhs = solve_linearized(op, y, f, v1 + v2);
    const GridField rhs = solve_linearized(op, y, f, v1) + solve_linearized(op, y, f, v2);
    CHECK(norm(lhs - rhs, NormKind::Linf) < 1e-12 * (1.0 + norm(lhs, NormKind::Linf)));
}

TEST_CASE("solve_second_derivative: zero for linear f, symmetric, dense oracle") {
    const GridDomain d = make_grid(0.0, 1.0, 12);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    Rng rng(17);
    GridField z1(d), z2(d);
    for (int i = 0; i < z1.size(); ++i) {
        z1[i] = rng.normal();
        z2[i] = rng.normal();
    }
    const GridField y = sample(d, [](double x, double) { return std::sin(kPi * x); });

    CHECK(norm(solve_second_derivative(op, y, Nonlinearity::zero(), z1, z2), NormKind::Linf) ==
          0.0);

    const Nonlinearity f = Nonlinearity::cubic();
    const GridField w12 = solve_second_derivative(op, y, f, z1, z2);
    const GridField w21 = solve_second_derivative(op, y, f, z2, z1);
    CHECK(norm(w12 - w21, NormKind::Linf) == 0.0);

    GridField shift(d), rhs(d);
    for (int i = 0; i < shift.size(); ++i) {
        shift[i] = f.fy(y[i]);
        rhs[i] = -f.fyy(y[i]) * z1[i] * z2[i];
    }
    const GridField w_dense = dense_solve(op, shift, rhs);
    CHECK(norm(w12 - w_dense, NormKind::Linf) < 1e-10);
}

TEST_CASE("solve_adjoint: trivial zero cases and Green's column") {
    const GridDomain d = make_grid(0.0, 1.0, 15);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const GridField y = sample(d, [](double x, double) { return x * (1 - x); });

    CHECK(norm(solve_adjoint(op, y, Nonlinearity::cubic(), CostIntegrand::zero(), GridField(d)),
               NormKind::Linf) == 0.0);

    const CostIntegrand track = CostIntegrand::tracking(y);
    CHECK(norm(solve_adjoint(op, y, Nonlinearity::cubic(), track, GridField(d)), NormKind::Linf) ==
          0.0);

    GridField spike(d);
    spike[7] = 1.0 / d.cell_volume();
    const Nonlinearity f = Nonlinearity::cubic();
    const GridField phi = solve_adjoint(op, y, f, CostIntegrand::zero(), spike);
    GridField shift(d);
    for (int i = 0; i < shift.size(); ++i) shift[i] = f.fy(y[i]);
    const GridField phi_dense = dense_solve(op, shift, spike);
    CHECK(norm(phi - phi_dense, NormKind::Linf) < 1e-9 * norm(phi_dense, NormKind::Linf));
}

TEST_CASE("adjoint identity: <z_{u,v}, r> = <v, phi_r>") {
    for (int dim : {1, 2}) {
        const GridDomain d =
            dim == 1 ? make_grid(0.0, 1.0, 40) : make_grid(2, {{0, 1}, {0, 1}}, {12, 12});
        const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
        const Nonlinearity f = Nonlinearity::cubic();
        const GridField y = sample(d, [](double x, double yy) { return x + 0.3 * yy; });
        Rng rng(23);
        for (int rep = 0; rep < 5; ++rep) {
            GridField v(d), r(d);
            for (int i = 0; i < v.size(); ++i) {
                v[i] = rng.normal();
                r[i] = rng.normal();
            }
            const GridField z = solve_linearized(op, y, f, v);
            GridField shift(d);
            for (int i = 0; i < shift.size(); ++i) shift[i] = f.fy(y[i]);
            const GridField phi_r = solve_shifted(op, shift, r);
            const double a = inner(z, r), b = inner(v, phi_r);
            CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("uniform bound over random feasible controls") {
    const GridDomain d = make_grid(0.0, 1.0, 33);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const Nonlinearity f = Nonlinearity::cubic();
    Rng rng(31);
    const double recorded_bound = 5.0;  // bounds [-2,2]: ||y||_H1 + ||y||_inf stays well below
    for (int s = 0; s < 100; ++s) {
        GridField u(d);
        for (int i = 0; i < u.size(); ++i) u[i] = rng.uniform(-2.0, 2.0);
        const StateSolveReport rep = solve_state(op, f, u);
        REQUIRE(rep.converged);
        CHECK(norm(rep.y, NormKind::H1Seminorm) + norm(rep.y, NormKind::Linf) < recorded_bound);
    }
}

TEST_CASE("Lipschitz ratio of state and adjoint in the control") {
    const GridDomain d = make_grid(0.0, 1.0, 25);
    const EllipticOperator op = assemble_operator(d, CoefficientSpec::laplace());
    const Nonlinearity f = Nonlinearity::cubic();
    const GridField y_d = sample(d, [](double x, double) { return std::sin(2 * kPi * x); });
    const CostIntegrand L = CostIntegrand::tracking(y_d);
    Rng rng(77);
    const double recorded_ratio = 10.0;
    for (int rep = 0; rep < 25; ++rep) {
        GridField u1(d), u2(d);
        for (int i = 0; i < u1.size(); ++i) {
            u1[i] = rng.uniform(-2.0, 2.0);
            u2[i] = rng.uniform(-2.0, 2.0);
        }
        const StateSolveReport r1 = solve_state(op, f, u1), r2 = solve_state(op, f, u2);
        const GridField p1 = solve_adjoint(op, r1.y, f, L, GridField(d));
        const GridField p2 = solve_adjoint(op, r2.y, f, L, GridField(d));
        const double num = norm(r1.y - r2.y, NormKind::L2) + norm(p1 - p2, NormKind::L2);
        const double den = norm(u1 - u2, NormKind::L2);
        if (den > 1e-12) CHECK(num / den < recorded_ratio);
    }
}

TEST_CASE("2D CG matches the dense oracle") {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 2}}, {6, 9});
    const EllipticOperator op =
        assemble_operator(d, CoefficientSpec::diagonal({1.0, 3.0}, {0.5, 0.0}));
    Rng rng(13);
    GridField b(d), shift(d);
    for (int i = 0; i < b.size(); ++i) {
        b[i] = rng.normal();
        shift[i] = rng.uniform(0.0, 2.0);
    }
    const GridField x = solve_shifted(op, shift, b);
    const GridField x_dense = dense_solve(op, shift, b);
    CHECK(norm(x - x_dense, NormKind::Linf) < 1e-9 * (1.0 + norm(x_dense, NormKind::Linf)));
}
