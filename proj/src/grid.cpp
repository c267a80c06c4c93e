#include "ocstab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ocstab {

GridDomain make_grid(int dim, const std::vector<AxisExtent>& extents,
                     const std::vector<int>& n_interior) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("make_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (static_cast<int>(extents.size()) != dim || static_cast<int>(n_interior.size()) != dim)
        throw std::invalid_argument("make_grid: need one extent and one node count per axis");

    GridDomain d;
    d.dim = dim;
    for (int a = 0; a < dim; ++a) {
        if (n_interior[a] < 3)
            throw std::invalid_argument("make_grid: n_interior must be >= 3 on every axis");
        if (!(extents[a].hi > extents[a].lo))
            throw std::invalid_argument("make_grid: extent upper end must exceed lower end");
        d.lo[a] = extents[a].lo;
        d.hi[a] = extents[a].hi;
        d.n[a] = n_interior[a];
        d.h[a] = (extents[a].hi - extents[a].lo) / (n_interior[a] + 1);
    }
    return d;
}

GridDomain make_grid(double lo, double hi, int n_interior) {
    return make_grid(1, {{lo, hi}}, {n_interior});
}

GridField::GridField(const GridDomain& d, std::vector<double> values)
    : dom_(d), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != d.node_count())
        throw std::invalid_argument("GridField: value count does not match node count");
}

namespace {
void require_same_domain(const GridField& a, const GridField& b) {
    if (!(a.domain() == b.domain()))
        throw std::invalid_argument("GridField: operands live on different grids");
}
}  // namespace

GridField& GridField::operator+=(const GridField& o) {
    require_same_domain(*this, o);
    for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    require_same_domain(*this, o);
    for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }
GridField operator-(GridField a) { return a *= -1.0; }

GridField hadamard(const GridField& a, const GridField& b) {
    require_same_domain(a, b);
    GridField r(a.domain());
    for (int i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
}

GridField axpy(const GridField& a, double s, const GridField& b) {
    require_same_domain(a, b);
    GridField r(a.domain());
    for (int i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
}

GridField sample(const GridDomain& d, const std::function<double(double, double)>& f) {
    GridField r(d);
    if (d.dim == 1) {
        for (int i = 0; i < d.n[0]; ++i) r[i] = f(d.coord(0, i), 0.0);
    } else {
        for (int iy = 0; iy < d.n[1]; ++iy)
            for (int ix = 0; ix < d.n[0]; ++ix)
                r[d.index(ix, iy)] = f(d.coord(0, ix), d.coord(1, iy));
    }
    return r;
}

double integrate(const GridField& f) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += f[i];
    return f.domain().cell_volume() * s;
}

double inner(const GridField& a, const GridField& b) {
    require_same_domain(a, b);
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.domain().cell_volume() * s;
}

namespace {
// Forward differences with implicit zero boundary on both ends of each line.
double h1_seminorm_sq(const GridField& f) {
    const GridDomain& d = f.domain();
    const double vol = d.cell_volume();
    double acc = 0.0;
    if (d.dim == 1) {
        const double w = vol / (d.h[0] * d.h[0]);
        double prev = 0.0;
        for (int i = 0; i < d.n[0]; ++i) {
            const double diff = f[i] - prev;
            acc += w * diff * diff;
            prev = f[i];
        }
        acc += w * prev * prev;  // jump to the right boundary
    } else {
        const double wx = vol / (d.h[0] * d.h[0]);
        const double wy = vol / (d.h[1] * d.h[1]);
        for (int iy = 0; iy < d.n[1]; ++iy) {
            double prev = 0.0;
            for (int ix = 0; ix < d.n[0]; ++ix) {
                const double diff = f[d.index(ix, iy)] - prev;
                acc += wx * diff * diff;
                prev = f[d.index(ix, iy)];
            }
            acc += wx * prev * prev;
        }
        for (int ix = 0; ix < d.n[0]; ++ix) {
            double prev = 0.0;
            for (int iy = 0; iy < d.n[1]; ++iy) {
                const double diff = f[d.index(ix, iy)] - prev;
                acc += wy * diff * diff;
                prev = f[d.index(ix, iy)];
            }
            acc += wy * prev * prev;
        }
    }
    return acc;
}
}  // namespace

double norm(const GridField& f, NormKind kind) {
    const double vol = f.domain().cell_volume();
    switch (kind) {
        case NormKind::L1: {
            double s = 0.0;
            for (int i = 0; i < f.size(); ++i) s += std::abs(f[i]);
            return vol * s;
        }
        case NormKind::L2: {
            double s = 0.0;
            for (int i = 0; i < f.size(); ++i) s += f[i] * f[i];
            return std::sqrt(vol * s);
        }
        case NormKind::Linf: {
            double m = 0.0;
            for (int i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
            return m;
        }
        case NormKind::H1Seminorm:
            return std::sqrt(h1_seminorm_sq(f));
    }
    return 0.0;
}

const char* norm_name(NormKind kind) {
    switch (kind) {
        case NormKind::L1: return "L1";
        case NormKind::L2: return "L2";
        case NormKind::Linf: return "Linf";
        case NormKind::H1Seminorm: return "H1seminorm";
    }
    return "?";
}

}  // namespace ocstab
