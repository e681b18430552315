#include "glvar/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glvar {

namespace {

// 5-point -Lap_h on interior unknowns, homogeneous Dirichlet ring.
void apply_neg_laplacian(const Grid2D& g, const std::vector<double>& u,
                         std::vector<double>& out) {
    const int mx = g.nx - 2;
    const int my = g.ny - 2;
    const double ih2 = 1.0 / (g.h * g.h);
    auto uat = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= mx || j >= my) return 0.0;
        return u[j * mx + i];
    };
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            out[j * mx + i] = (4.0 * uat(i, j) - uat(i - 1, j) - uat(i + 1, j) -
                               uat(i, j - 1) - uat(i, j + 1)) *
                              ih2;
        }
    }
}

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace

PoissonResult solve_poisson_dirichlet(const Grid2D& grid, const ScalarField& rhs,
                                      double tol, int max_iters) {
    if (!rhs.grid.same_as(grid)) {
        throw ConfigError("solve_poisson_dirichlet: rhs grid mismatch");
    }
    if (max_iters < 0) max_iters = 10 * grid.nx * grid.ny;

    const int mx = grid.nx - 2;
    const int my = grid.ny - 2;
    const int m = mx * my;
    std::vector<double> b(m);
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            b[j * mx + i] = rhs.at(i + 1, j + 1);
        }
    }

    PoissonResult res;
    res.f = ScalarField(grid);
    const double bnorm = std::sqrt(dot_vec(b, b));
    if (bnorm == 0.0) {
        return res;  // unique zero solution
    }

    std::vector<double> x(m, 0.0), r = b, p = b, ap(m);
    double rr = dot_vec(r, r);
    int it = 0;
    while (it < max_iters) {
        apply_neg_laplacian(grid, p, ap);
        const double alpha = rr / dot_vec(p, ap);
        for (int k = 0; k < m; ++k) x[k] += alpha * p[k];
        for (int k = 0; k < m; ++k) r[k] -= alpha * ap[k];
        const double rr_new = dot_vec(r, r);
        ++it;
        if (std::sqrt(rr_new) <= tol * bnorm) {
            rr = rr_new;
            break;
        }
        const double beta = rr_new / rr;
        for (int k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
        rr = rr_new;
    }
    res.residual = std::sqrt(rr) / bnorm;
    res.iterations = it;
    if (res.residual > tol) {
        std::ostringstream os;
        os << "Poisson solve stalled: relative residual " << res.residual << " after "
           << it << " iterations (target " << tol << ")";
        throw NumericError(os.str());
    }
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            res.f.at(i + 1, j + 1) = x[j * mx + i];
        }
    }
    return res;
}

GaugeField build_F(const MagneticProfile& b0, const Grid2D& grid, double link_scale) {
    ScalarField rhs(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            rhs.at(i, j) = b0.value(grid.node(i, j));
        }
    }
    const PoissonResult ps = solve_poisson_dirichlet(grid, rhs);
    const ScalarField& f = ps.f;
    const int nx = grid.nx, ny = grid.ny;
    const double h = grid.h;

    // Gradient of f with PDE-closed normal derivatives on the boundary:
    // along a zero Dirichlet row the tangential second derivative vanishes,
    // so f_nn = -B0 there and f_n = f(one in)/h + (h/2) B0. With this closure
    // the plaquette circulation telescopes to the discrete Poisson equation
    // and curl F reproduces the four-corner node average of B0 exactly on
    // every plaquette except the four corner ones.
    ScalarField fx(grid), fy(grid);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i + 1 < nx; ++i) {
            fx.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
        }
        fx.at(0, j) = f.at(1, j) / h + 0.5 * h * rhs.at(0, j);
        fx.at(nx - 1, j) = -f.at(nx - 2, j) / h - 0.5 * h * rhs.at(nx - 1, j);
    }
    for (int i = 0; i < nx; ++i) {
        for (int j = 1; j + 1 < ny; ++j) {
            fy.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
        }
        fy.at(i, 0) = f.at(i, 1) / h + 0.5 * h * rhs.at(i, 0);
        fy.at(i, ny - 1) = -f.at(i, ny - 2) / h - 0.5 * h * rhs.at(i, ny - 1);
    }
    // tangential derivatives along the zero rows vanish identically
    for (int j = 0; j < ny; ++j) {
        fy.at(0, j) = (j == 0 || j == ny - 1) ? 0.0 : fy.at(0, j);
        fy.at(nx - 1, j) = (j == 0 || j == ny - 1) ? 0.0 : fy.at(nx - 1, j);
    }
    for (int i = 0; i < nx; ++i) {
        fx.at(i, 0) = (i == 0 || i == nx - 1) ? 0.0 : fx.at(i, 0);
        fx.at(i, ny - 1) = (i == 0 || i == nx - 1) ? 0.0 : fx.at(i, ny - 1);
    }

    GaugeField F(grid, link_scale);
    for (int k = 0; k < grid.num_nodes(); ++k) {
        F.ax[k] = fy.v[k];
        F.ay[k] = -fx.v[k];
    }
    return F;
}

GaugeField canonical_A0_field(const Grid2D& grid, Point center, double coeff,
                              double link_scale) {
    GaugeField a(grid, link_scale);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Point p = canonical_A0(grid.node(i, j) - center);
            a.ax[grid.id(i, j)] = coeff * p.x;
            a.ay[grid.id(i, j)] = coeff * p.y;
        }
    }
    return a;
}

LocalGaugePhase local_gauge_phase(const GaugeField& F, Point x0, Point xt, double ell) {
    const Grid2D& g = F.grid;
    const double tol = 1e-9 * std::max(1.0, g.h);
    const double xlo = x0.x - 0.5 * ell, xhi = x0.x + 0.5 * ell;
    const double ylo = x0.y - 0.5 * ell, yhi = x0.y + 0.5 * ell;
    if (xlo < g.origin.x - tol || ylo < g.origin.y - tol ||
        xhi > g.origin.x + g.side_x() + tol || yhi > g.origin.y + g.side_y() + tol) {
        throw ConfigError("local_gauge_phase: cell exits the grid rectangle");
    }
    if (xt.x < xlo - tol || xt.x > xhi + tol || xt.y < ylo - tol || xt.y > yhi + tol) {
        throw ConfigError("local_gauge_phase: Taylor point outside the cell");
    }

    LocalGaugePhase out;
    out.cell.i0 = static_cast<int>(std::ceil((xlo - g.origin.x) / g.h - 1e-9));
    out.cell.i1 = static_cast<int>(std::floor((xhi - g.origin.x) / g.h + 1e-9));
    out.cell.j0 = static_cast<int>(std::ceil((ylo - g.origin.y) / g.h - 1e-9));
    out.cell.j1 = static_cast<int>(std::floor((yhi - g.origin.y) / g.h + 1e-9));
    if (out.cell.i1 - out.cell.i0 < 2 || out.cell.j1 - out.cell.j0 < 2) {
        throw ConfigError("local_gauge_phase: cell smaller than three grid nodes");
    }

    // Snap the Taylor point to the nearest node; the Jacobian is taken from
    // the discrete F samples, which is what the splitting must match.
    int ti = static_cast<int>(std::lround((xt.x - g.origin.x) / g.h));
    int tj = static_cast<int>(std::lround((xt.y - g.origin.y) / g.h));
    ti = std::clamp(ti, 0, g.nx - 1);
    tj = std::clamp(tj, 0, g.ny - 1);
    out.xt_used = g.node(ti, tj);

    auto dx_at = [&](const std::vector<double>& f, int i, int j) {
        const double i2h = 1.0 / (2.0 * g.h);
        if (i == 0)
            return (-3.0 * f[g.id(0, j)] + 4.0 * f[g.id(1, j)] - f[g.id(2, j)]) * i2h;
        if (i == g.nx - 1)
            return (3.0 * f[g.id(i, j)] - 4.0 * f[g.id(i - 1, j)] + f[g.id(i - 2, j)]) *
                   i2h;
        return (f[g.id(i + 1, j)] - f[g.id(i - 1, j)]) * i2h;
    };
    auto dy_at = [&](const std::vector<double>& f, int i, int j) {
        const double i2h = 1.0 / (2.0 * g.h);
        if (j == 0)
            return (-3.0 * f[g.id(i, 0)] + 4.0 * f[g.id(i, 1)] - f[g.id(i, 2)]) * i2h;
        if (j == g.ny - 1)
            return (3.0 * f[g.id(i, j)] - 4.0 * f[g.id(i, j - 1)] + f[g.id(i, j - 2)]) *
                   i2h;
        return (f[g.id(i, j + 1)] - f[g.id(i, j - 1)]) * i2h;
    };

    const double m11 = dx_at(F.ax, ti, tj), m12 = dy_at(F.ax, ti, tj);
    const double m21 = dx_at(F.ay, ti, tj), m22 = dy_at(F.ay, ti, tj);
    out.b0_at_xt = m21 - m12;  // curl F at the Taylor point

    const double s11 = m11, s22 = m22, s12 = 0.5 * (m12 + m21);  // symmetric part
    const double f1t = F.ax[g.id(ti, tj)];
    const double f2t = F.ay[g.id(ti, tj)];
    const Point d0 = x0 - out.xt_used;
    const double c1 = f1t + m11 * d0.x + m12 * d0.y;
    const double c2 = f2t + m21 * d0.x + m22 * d0.y;

    auto phi0 = [&](Point p) {
        const Point r = p - x0;
        const double quad =
            0.5 * (s11 * r.x * r.x + 2.0 * s12 * r.x * r.y + s22 * r.y * r.y);
        return quad + c1 * p.x + c2 * p.y;
    };

    out.phi = ScalarField(g);
    for (int j = out.cell.j0; j <= out.cell.j1; ++j) {
        for (int i = out.cell.i0; i <= out.cell.i1; ++i) {
            out.phi.at(i, j) = phi0(g.node(i, j));
        }
    }

    // Residual of the splitting, with grad_h phi0 taken on the cell subgrid.
    const int cnx = out.cell.i1 - out.cell.i0 + 1;
    const int cny = out.cell.j1 - out.cell.j0 + 1;
    Grid2D cg{g.node(out.cell.i0, out.cell.j0), cnx, cny, g.h};
    ScalarField phic(cg);
    for (int j = 0; j < cny; ++j) {
        for (int i = 0; i < cnx; ++i) {
            phic.at(i, j) = out.phi.at(out.cell.i0 + i, out.cell.j0 + j);
        }
    }
    const ScalarField px = grad_x(phic);
    const ScalarField py = grad_y(phic);
    double err = 0.0;
    for (int j = 0; j < cny; ++j) {
        for (int i = 0; i < cnx; ++i) {
            const int hi = out.cell.i0 + i, hj = out.cell.j0 + j;
            const Point p = g.node(hi, hj);
            const Point a0 = canonical_A0(p - x0);
            const double rx = F.ax[g.id(hi, hj)] - px.at(i, j) - out.b0_at_xt * a0.x;
            const double ry = F.ay[g.id(hi, hj)] - py.at(i, j) - out.b0_at_xt * a0.y;
            err = std::max(err, std::sqrt(rx * rx + ry * ry));
        }
    }
    out.err = err;
    return out;
}

std::pair<ComplexField, GaugeField> gauge_transform(const ComplexField& psi,
                                                    const GaugeField& a,
                                                    const ScalarField& phi,
                                                    double scale) {
    if (!psi.grid.same_as(a.grid) || !psi.grid.same_as(phi.grid)) {
        throw ConfigError("gauge_transform: grid mismatch");
    }
    ComplexField psi2 = psi;
    for (int k = 0; k < psi.grid.num_nodes(); ++k) {
        const double th = scale * phi.v[k];
        psi2.v[k] = psi.v[k] * Complex{std::cos(th), -std::sin(th)};
    }
    const ScalarField gx = grad_x(phi);
    const ScalarField gy = grad_y(phi);
    GaugeField a2 = a;
    for (int k = 0; k < a.grid.num_nodes(); ++k) {
        a2.ax[k] = a.ax[k] - gx.v[k];
        a2.ay[k] = a.ay[k] - gy.v[k];
    }
    return {std::move(psi2), std::move(a2)};
}

}  // namespace glvar
