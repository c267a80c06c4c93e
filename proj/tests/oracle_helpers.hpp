// Dense linear-algebra oracles for the test suites. These rebuild the
// operators column by column and solve with Eigen, independently of the
// banded/CG paths used by the library.
#ifndef OCSTAB_TESTS_ORACLE_HELPERS_HPP
#define OCSTAB_TESTS_ORACLE_HELPERS_HPP

#include <Eigen/Dense>

#include "ocstab/pde.hpp"

namespace ocstab::testing {

inline Eigen::VectorXd to_eigen(const GridField& f) {
    Eigen::VectorXd v(f.size());
    for (int i = 0; i < f.size(); ++i) v(i) = f[i];
    return v;
}

inline GridField from_eigen(const GridDomain& d, const Eigen::VectorXd& v) {
    GridField f(d);
    for (int i = 0; i < f.size(); ++i) f[i] = v(i);
    return f;
}

inline Eigen::MatrixXd dense_matrix(const EllipticOperator& op, const GridField& shift) {
    const int n = op.domain().node_count();
    Eigen::MatrixXd A(n, n);
    for (int j = 0; j < n; ++j) {
        GridField ej(op.domain());
        ej[j] = 1.0;
        const GridField col = op.apply(ej);
        for (int i = 0; i < n; ++i) A(i, j) = col[i] + (i == j ? shift[i] : 0.0);
    }
    return A;
}

inline GridField dense_solve(const EllipticOperator& op, const GridField& shift,
                             const GridField& b) {
    const Eigen::MatrixXd A = dense_matrix(op, shift);
    const Eigen::VectorXd x = A.partialPivLu().solve(to_eigen(b));
    return from_eigen(op.domain(), x);
}

}  // namespace ocstab::testing

#endif
