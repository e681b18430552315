#include "glvar/grid.hpp"

#include <cmath>
#include <sstream>

namespace glvar {

Grid2D make_grid(Point origin, double side_x, double side_y, int nx, int ny) {
    if (nx < 3 || ny < 3) {
        throw ConfigError("make_grid: need at least 3 nodes per side");
    }
    if (!(side_x > 0.0) || !(side_y > 0.0)) {
        throw ConfigError("make_grid: side lengths must be positive");
    }
    const double hx = side_x / (nx - 1);
    const double hy = side_y / (ny - 1);
    if (std::abs(hx - hy) > 1e-12 * std::max(1.0, hx)) {
        std::ostringstream os;
        os << "make_grid: anisotropic spacing, hx=" << hx << " hy=" << hy;
        throw ConfigError(os.str());
    }
    return Grid2D{origin, nx, ny, hx};
}

IndexRect full_rect(const Grid2D& g) { return {0, g.nx - 1, 0, g.ny - 1}; }

void check_rect(const Grid2D& g, const IndexRect& r) {
    if (r.i0 < 0 || r.j0 < 0 || r.i1 >= g.nx || r.j1 >= g.ny || r.i1 <= r.i0 ||
        r.j1 <= r.j0) {
        throw ConfigError("index rectangle is empty or exits the grid");
    }
}

double rect_node_weight(const Grid2D& g, const IndexRect& r, int i, int j) {
    const double wx = (i == r.i0 || i == r.i1) ? 0.5 : 1.0;
    const double wy = (j == r.j0 || j == r.j1) ? 0.5 : 1.0;
    return g.h * g.h * wx * wy;
}

void ComplexField::enforce_bc() {
    if (bc != Bc::DirichletZero) return;
    for (int i = 0; i < grid.nx; ++i) {
        at(i, 0) = Complex{0.0, 0.0};
        at(i, grid.ny - 1) = Complex{0.0, 0.0};
    }
    for (int j = 0; j < grid.ny; ++j) {
        at(0, j) = Complex{0.0, 0.0};
        at(grid.nx - 1, j) = Complex{0.0, 0.0};
    }
}

void ComplexField::check_bc() const {
    if (bc != Bc::DirichletZero) return;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (!grid.boundary(i, j)) continue;
            if (at(i, j) != Complex{0.0, 0.0}) {
                throw ConfigError("dirichlet_zero field has nonzero boundary node");
            }
        }
    }
}

void MagneticProfile::validate_on(const Grid2D& g) const {
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Point p = g.node(i, j);
            const double b = std::abs(value(p));
            const Point gr = grad(p);
            if (b + std::abs(gr.x) + std::abs(gr.y) <= 1e-14) {
                std::ostringstream os;
                os << "magnetic profile '" << name << "' violates |B0|+|grad B0|>0 at ("
                   << p.x << ", " << p.y << ")";
                throw ConfigError(os.str());
            }
        }
    }
}

double x_link_theta(const GaugeField& a, int i, int j) {
    const int p = a.grid.id(i, j);
    const int q = a.grid.id(i + 1, j);
    return a.link_scale * a.grid.h * 0.5 * (a.ax[p] + a.ax[q]);
}

double y_link_theta(const GaugeField& a, int i, int j) {
    const int p = a.grid.id(i, j);
    const int q = a.grid.id(i, j + 1);
    return a.link_scale * a.grid.h * 0.5 * (a.ay[p] + a.ay[q]);
}

double integrate(const ScalarField& f) {
    const Grid2D& g = f.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            s += g.node_weight(i, j) * f.at(i, j);
        }
    }
    return s;
}

double integrate(const ScalarField& f, const IndexRect& r) {
    const Grid2D& g = f.grid;
    check_rect(g, r);
    double s = 0.0;
    for (int j = r.j0; j <= r.j1; ++j) {
        for (int i = r.i0; i <= r.i1; ++i) {
            s += rect_node_weight(g, r, i, j) * f.at(i, j);
        }
    }
    return s;
}

double integrate(const Grid2D& g, const std::function<double(Point)>& f) {
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            s += g.node_weight(i, j) * f(g.node(i, j));
        }
    }
    return s;
}

PlaquetteField discrete_curl(const GaugeField& a) {
    const Grid2D& g = a.grid;
    PlaquetteField c(g);
    const double h = g.h;
    for (int j = 0; j < g.plaq_ny(); ++j) {
        for (int i = 0; i < g.plaq_nx(); ++i) {
            const int p1 = g.id(i, j);
            const int p2 = g.id(i + 1, j);
            const int p3 = g.id(i + 1, j + 1);
            const int p4 = g.id(i, j + 1);
            // counterclockwise circulation, edge midpoints by node averages
            const double circ =
                h * 0.5 *
                ((a.ax[p1] + a.ax[p2]) + (a.ay[p2] + a.ay[p3]) -
                 (a.ax[p4] + a.ax[p3]) - (a.ay[p1] + a.ay[p4]));
            c.at(i, j) = circ / (h * h);
        }
    }
    return c;
}

EdgeField covariant_diff(const ComplexField& psi, const GaugeField& a) {
    if (!psi.grid.same_as(a.grid)) {
        throw ConfigError("covariant_diff: field and potential live on different grids");
    }
    const Grid2D& g = psi.grid;
    EdgeField e;
    e.grid = g;
    e.ex.assign((g.nx - 1) * g.ny, Complex{0.0, 0.0});
    e.ey.assign(g.nx * (g.ny - 1), Complex{0.0, 0.0});
    const double h = g.h;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th = x_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            e.ex[e.xid(i, j)] = (u * psi.at(i + 1, j) - psi.at(i, j)) / h;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th = y_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            e.ey[e.yid(i, j)] = (u * psi.at(i, j + 1) - psi.at(i, j)) / h;
        }
    }
    return e;
}

ScalarField grad_x(const ScalarField& f) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double i2h = 1.0 / (2.0 * g.h);
    for (int j = 0; j < g.ny; ++j) {
        out.at(0, j) = (-3.0 * f.at(0, j) + 4.0 * f.at(1, j) - f.at(2, j)) * i2h;
        for (int i = 1; i + 1 < g.nx; ++i) {
            out.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) * i2h;
        }
        const int n = g.nx - 1;
        out.at(n, j) = (3.0 * f.at(n, j) - 4.0 * f.at(n - 1, j) + f.at(n - 2, j)) * i2h;
    }
    return out;
}

ScalarField grad_y(const ScalarField& f) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double i2h = 1.0 / (2.0 * g.h);
    for (int i = 0; i < g.nx; ++i) {
        out.at(i, 0) = (-3.0 * f.at(i, 0) + 4.0 * f.at(i, 1) - f.at(i, 2)) * i2h;
        for (int j = 1; j + 1 < g.ny; ++j) {
            out.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) * i2h;
        }
        const int n = g.ny - 1;
        out.at(i, n) = (3.0 * f.at(i, n) - 4.0 * f.at(i, n - 1) + f.at(i, n - 2)) * i2h;
    }
    return out;
}

ScalarField grad_x_transpose(const ScalarField& r) {
    const Grid2D& g = r.grid;
    ScalarField out(g);
    const double i2h = 1.0 / (2.0 * g.h);
    for (int j = 0; j < g.ny; ++j) {
        out.at(0, j) += -3.0 * i2h * r.at(0, j);
        out.at(1, j) += 4.0 * i2h * r.at(0, j);
        out.at(2, j) += -1.0 * i2h * r.at(0, j);
        for (int i = 1; i + 1 < g.nx; ++i) {
            out.at(i + 1, j) += i2h * r.at(i, j);
            out.at(i - 1, j) += -i2h * r.at(i, j);
        }
        const int n = g.nx - 1;
        out.at(n, j) += 3.0 * i2h * r.at(n, j);
        out.at(n - 1, j) += -4.0 * i2h * r.at(n, j);
        out.at(n - 2, j) += 1.0 * i2h * r.at(n, j);
    }
    return out;
}

ScalarField grad_y_transpose(const ScalarField& r) {
    const Grid2D& g = r.grid;
    ScalarField out(g);
    const double i2h = 1.0 / (2.0 * g.h);
    for (int i = 0; i < g.nx; ++i) {
        out.at(i, 0) += -3.0 * i2h * r.at(i, 0);
        out.at(i, 1) += 4.0 * i2h * r.at(i, 0);
        out.at(i, 2) += -1.0 * i2h * r.at(i, 0);
        for (int j = 1; j + 1 < g.ny; ++j) {
            out.at(i, j + 1) += i2h * r.at(i, j);
            out.at(i, j - 1) += -i2h * r.at(i, j);
        }
        const int n = g.ny - 1;
        out.at(i, n) += 3.0 * i2h * r.at(i, n);
        out.at(i, n - 1) += -4.0 * i2h * r.at(i, n);
        out.at(i, n - 2) += 1.0 * i2h * r.at(i, n);
    }
    return out;
}

}  // namespace glvar
