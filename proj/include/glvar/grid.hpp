#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "glvar/errors.hpp"

namespace glvar {

using Complex = std::complex<double>;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::sqrt(p.x * p.x + p.y * p.y); }

/// Uniform node grid on an axis-aligned rectangle. Spacing is isotropic;
/// nodes are (origin.x + i*h, origin.y + j*h), 0 <= i < nx, 0 <= j < ny.
struct Grid2D {
    Point origin{};
    int nx = 0;
    int ny = 0;
    double h = 0.0;

    int num_nodes() const { return nx * ny; }
    int id(int i, int j) const { return j * nx + i; }
    Point node(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
    double side_x() const { return h * (nx - 1); }
    double side_y() const { return h * (ny - 1); }
    int plaq_nx() const { return nx - 1; }
    int plaq_ny() const { return ny - 1; }
    int num_plaquettes() const { return (nx - 1) * (ny - 1); }
    Point plaq_center(int i, int j) const {
        return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
    }
    bool boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
    }
    // Trapezoidal node weight.
    double node_weight(int i, int j) const {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
        return h * h * wx * wy;
    }

    bool same_as(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && h == o.h && origin.x == o.origin.x &&
               origin.y == o.origin.y;
    }
};

/// Builds a grid, enforcing isotropic spacing h = side_x/(nx-1) = side_y/(ny-1).
Grid2D make_grid(Point origin, double side_x, double side_y, int nx, int ny);

/// Inclusive node-index rectangle [i0,i1] x [j0,j1] inside a grid.
struct IndexRect {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
};

IndexRect full_rect(const Grid2D& g);
void check_rect(const Grid2D& g, const IndexRect& r);
// Trapezoidal weight of node (i,j) for quadrature restricted to r.
double rect_node_weight(const Grid2D& g, const IndexRect& r, int i, int j);

struct ScalarField {
    Grid2D grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g) : grid(g), v(g.num_nodes(), 0.0) {}
    ScalarField(const Grid2D& g, std::vector<double> values)
        : grid(g), v(std::move(values)) {}
    double& at(int i, int j) { return v[grid.id(i, j)]; }
    double at(int i, int j) const { return v[grid.id(i, j)]; }
};

/// Plaquette-centered samples, (nx-1) x (ny-1).
struct PlaquetteField {
    Grid2D grid;
    std::vector<double> v;

    PlaquetteField() = default;
    explicit PlaquetteField(const Grid2D& g) : grid(g), v(g.num_plaquettes(), 0.0) {}
    int id(int i, int j) const { return j * grid.plaq_nx() + i; }
    double& at(int i, int j) { return v[id(i, j)]; }
    double at(int i, int j) const { return v[id(i, j)]; }
};

enum class Bc { Free, DirichletZero };

/// Order parameter sampled at nodes.
struct ComplexField {
    Grid2D grid;
    std::vector<Complex> v;
    Bc bc = Bc::Free;

    ComplexField() = default;
    explicit ComplexField(const Grid2D& g, Bc b = Bc::Free)
        : grid(g), v(g.num_nodes(), Complex{0.0, 0.0}), bc(b) {}
    Complex& at(int i, int j) { return v[grid.id(i, j)]; }
    Complex at(int i, int j) const { return v[grid.id(i, j)]; }
    // Dirichlet fields must carry exact zeros on the boundary ring.
    void enforce_bc();
    void check_bc() const;
};

/// Vector potential as node samples. link_scale is the factor multiplying A
/// in the covariant derivative (kappa*H for the physical model, sigma = +-1
/// for the reduced cell problem).
struct GaugeField {
    Grid2D grid;
    std::vector<double> ax, ay;
    double link_scale = 0.0;

    GaugeField() = default;
    GaugeField(const Grid2D& g, double scale)
        : grid(g), ax(g.num_nodes(), 0.0), ay(g.num_nodes(), 0.0), link_scale(scale) {}
};

/// Analytic applied field B0 with gradient.
struct MagneticProfile {
    std::function<double(Point)> value;
    std::function<Point(Point)> grad;
    std::string name = "custom";

    // |B0| + |grad B0| must be positive at every sampled node.
    void validate_on(const Grid2D& g) const;
};

/// Covariant forward differences per edge. ex has (nx-1)*ny entries indexed
/// j*(nx-1)+i, ey has nx*(ny-1) entries indexed j*nx+i.
struct EdgeField {
    Grid2D grid;
    std::vector<Complex> ex, ey;

    int xid(int i, int j) const { return j * (grid.nx - 1) + i; }
    int yid(int i, int j) const { return j * grid.nx + i; }
};

// Quadrature weight of an x-edge / y-edge (midpoint along the edge,
// trapezoid across); pairs with node weights so that strip sums telescope.
inline double x_edge_weight(const Grid2D& g, int /*i*/, int j) {
    return g.h * g.h * ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0);
}
inline double y_edge_weight(const Grid2D& g, int i, int /*j*/) {
    return g.h * g.h * ((i == 0 || i == g.nx - 1) ? 0.5 : 1.0);
}

// Midpoint-rule link angles: theta = link_scale * h * (A_p + A_q)/2 . t_hat.
double x_link_theta(const GaugeField& a, int i, int j);
double y_link_theta(const GaugeField& a, int i, int j);

/// Trapezoidal integral of node samples over the whole rectangle.
double integrate(const ScalarField& f);
/// Trapezoidal integral restricted to a node-index rectangle.
double integrate(const ScalarField& f, const IndexRect& r);
/// Trapezoidal integral of a point function sampled at nodes.
double integrate(const Grid2D& g, const std::function<double(Point)>& f);

/// Per-plaquette circulation of a divided by plaquette area.
PlaquetteField discrete_curl(const GaugeField& a);

/// Gauge-covariant forward differences (U_pq psi_q - psi_p)/h per edge.
EdgeField covariant_diff(const ComplexField& psi, const GaugeField& a);

// Second-order node gradients (centered interior, one-sided at the boundary)
// and their plain transposes, used for gauge shifts and the stream-function
// parameterization.
ScalarField grad_x(const ScalarField& f);
ScalarField grad_y(const ScalarField& f);
ScalarField grad_x_transpose(const ScalarField& r);
ScalarField grad_y_transpose(const ScalarField& r);

}  // namespace glvar
