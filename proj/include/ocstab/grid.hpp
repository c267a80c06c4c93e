#ifndef OCSTAB_GRID_HPP
#define OCSTAB_GRID_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace ocstab {

/// Uniform tensor grid on a box in R^N (N = 1 or 2) with homogeneous
/// Dirichlet boundary. Only interior nodes carry unknowns; the boundary
/// value 0 is implicit everywhere.
struct GridDomain {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    std::array<int, 2> n{1, 1};    // interior nodes per axis; axis >= dim holds 1
    std::array<double, 2> h{1.0, 1.0};

    int node_count() const { return dim == 2 ? n[0] * n[1] : n[0]; }
    double cell_volume() const { return dim == 2 ? h[0] * h[1] : h[0]; }

    /// Coordinate of interior node index idx (0-based) along an axis.
    double coord(int axis, int idx) const { return lo[axis] + (idx + 1) * h[axis]; }

    /// Linear index of a 2D interior node (row-major over x).
    int index(int ix, int iy) const { return ix + n[0] * iy; }

    bool operator==(const GridDomain&) const = default;
};

struct AxisExtent {
    double lo = 0.0;
    double hi = 1.0;
};

/// Builds a grid; rejects dim outside {1,2}, n_interior < 3, hi <= lo.
GridDomain make_grid(int dim, const std::vector<AxisExtent>& extents,
                     const std::vector<int>& n_interior);
GridDomain make_grid(double lo, double hi, int n_interior);

/// One scalar value per interior node of a GridDomain.
class GridField {
public:
    GridField() = default;
    explicit GridField(const GridDomain& d, double fill = 0.0)
        : dom_(d), v_(static_cast<size_t>(d.node_count()), fill) {}
    GridField(const GridDomain& d, std::vector<double> values);

    const GridDomain& domain() const { return dom_; }
    int size() const { return static_cast<int>(v_.size()); }
    bool empty() const { return v_.empty(); }

    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }

    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double s);

private:
    GridDomain dom_;
    std::vector<double> v_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);
GridField operator-(GridField a);

/// Elementwise product.
GridField hadamard(const GridField& a, const GridField& b);

/// a + s*b
GridField axpy(const GridField& a, double s, const GridField& b);

/// Nodal evaluation of f(x, y) on the interior nodes (y = 0 in 1D).
GridField sample(const GridDomain& d, const std::function<double(double, double)>& f);

enum class NormKind { L1, L2, Linf, H1Seminorm };

/// Nodal quadrature with constant weight prod(h_i); boundary contributes 0.
double integrate(const GridField& f);

/// Quadrature-weighted L2 inner product.
double inner(const GridField& a, const GridField& b);

double norm(const GridField& f, NormKind kind);

const char* norm_name(NormKind kind);

}  // namespace ocstab

#endif
