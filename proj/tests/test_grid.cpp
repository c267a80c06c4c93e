#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ocstab/grid.hpp"
#include "ocstab/rng.hpp"

using namespace ocstab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("make_grid spacing and node placement") {
    const GridDomain d = make_grid(0.0, 1.0, 3);
    CHECK(d.h[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d.coord(0, 0) == doctest::Approx(0.25));
    CHECK(d.coord(0, 1) == doctest::Approx(0.5));
    CHECK(d.coord(0, 2) == doctest::Approx(0.75));

    const GridDomain d2 = make_grid(2, {{0, 1}, {0, 1}}, {3, 3});
    CHECK(d2.node_count() == 9);

    const GridDomain d3 = make_grid(0.0, 2.0, 7);
    CHECK(d3.h[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(3, {{0, 1}}, {5}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0.5, 5), std::invalid_argument);
}

TEST_CASE("integrate: constants, zero, sin") {
    for (int n : {3, 10, 33}) {
        const GridDomain d = make_grid(0.0, 1.0, n);
        CHECK(integrate(GridField(d, 1.0)) ==
              doctest::Approx(static_cast<double>(n) / (n + 1)).epsilon(1e-15));
        CHECK(integrate(GridField(d)) == 0.0);
    }
    const GridDomain d = make_grid(0.0, 1.0, 99);
    const GridField s = sample(d, [](double x, double) { return std::sin(kPi * x); });
    CHECK(std::abs(integrate(s) - 2.0 / kPi) < 1e-3);
}

TEST_CASE("norms: trivial values") {
    const GridDomain d = make_grid(0.0, 1.0, 17);
    const GridField z(d);
    for (auto kind : {NormKind::L1, NormKind::L2, NormKind::Linf, NormKind::H1Seminorm})
        CHECK(norm(z, kind) == 0.0);

    const double c = 0.73;
    const GridField cc(d, c);
    CHECK(norm(cc, NormKind::Linf) == doctest::Approx(c));
    CHECK(norm(cc, NormKind::L2) == doctest::Approx(c * std::sqrt(17.0 / 18.0)).epsilon(1e-14));
}

TEST_CASE("norms are positive definite and satisfy the triangle inequality") {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 2}}, {5, 7});
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        GridField a(d), b(d);
        for (int i = 0; i < a.size(); ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        for (auto kind : {NormKind::L1, NormKind::L2, NormKind::Linf, NormKind::H1Seminorm}) {
            CHECK(norm(a, kind) > 0.0);
            CHECK(norm(a + b, kind) <= norm(a, kind) + norm(b, kind) + 1e-12);
        }
    }
}

TEST_CASE("Cauchy-Schwarz for the discrete inner product") {
    const GridDomain d = make_grid(0.0, 1.0, 41);
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        GridField a(d), b(d);
        for (int i = 0; i < a.size(); ++i) {
            a[i] = rng.uniform(-2.0, 2.0);
            b[i] = rng.uniform(-2.0, 2.0);
        }
        CHECK(std::abs(inner(a, b)) <=
              norm(a, NormKind::L2) * norm(b, NormKind::L2) + 1e-12);
    }
}

TEST_CASE("L1 bounded by sqrt(measure) times L2") {
    const GridDomain d = make_grid(2, {{0, 1}, {0, 1}}, {9, 9});
    const double measure = d.cell_volume() * d.node_count();
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        GridField a(d);
        for (int i = 0; i < a.size(); ++i) a[i] = rng.normal();
        CHECK(norm(a, NormKind::L1) <= std::sqrt(measure) * norm(a, NormKind::L2) + 1e-12);
    }
}

TEST_CASE("refinement: nodal quadrature converges at rate >= 1") {
    auto f = [](double x, double) { return std::exp(x); };
    const double exact = std::exp(1.0) - 1.0;
    double prev_err = 0.0;
    std::vector<double> errs;
    for (int n : {32, 64, 128, 256}) {
        const GridDomain d = make_grid(0.0, 1.0, n);
        errs.push_back(std::abs(integrate(sample(d, f)) - exact));
    }
    for (size_t k = 1; k < errs.size(); ++k) {
        const double order = std::log2(errs[k - 1] / errs[k]);
        CHECK(order >= 0.9);
    }
    (void)prev_err;
}

TEST_CASE("H1 seminorm matches the analytic Dirichlet energy") {
    // For the first Laplace eigenfunction sin(pi x), |f|_{H1}^2 -> pi^2/2.
    const GridDomain d = make_grid(0.0, 1.0, 512);
    const GridField s = sample(d, [](double x, double) { return std::sin(kPi * x); });
    const double v = norm(s, NormKind::H1Seminorm);
    CHECK(v * v == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-3));
}

TEST_CASE("field arithmetic and domain mismatch") {
    const GridDomain d1 = make_grid(0.0, 1.0, 5);
    const GridDomain d2 = make_grid(0.0, 1.0, 6);
    GridField a(d1, 1.0), b(d2, 1.0);
    CHECK_THROWS_AS(a += b, std::invalid_argument);
    const GridField c = axpy(a, 2.0, a);
    CHECK(c[0] == doctest::Approx(3.0));
    CHECK(hadamard(c, c)[2] == doctest::Approx(9.0));
}
