#include "glvar/energy.hpp"

#include <cmath>
#include <memory>

#include "glvar/potential.hpp"

namespace glvar {

namespace {

// Compensated accumulator: line searches need energy differences close to
// machine precision of |E| rather than of the summed term magnitudes.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void check_pair(const ComplexField& psi, const GaugeField& a, const GLParams& prm) {
    prm.validate();
    if (!psi.grid.same_as(a.grid)) {
        throw ConfigError("psi and A live on different grids");
    }
    const double ls = prm.link_scale();
    if (std::abs(a.link_scale - ls) > 1e-9 * std::max(1.0, ls)) {
        throw ConfigError("gauge field link_scale must equal kappa*H");
    }
}

void check_reduced(const ComplexField& u, double b, int sigma, double R) {
    if (u.bc != Bc::DirichletZero) {
        throw ConfigError("reduced energy: field must carry dirichlet_zero bc");
    }
    u.check_bc();
    if (!(b >= 0.0)) throw ConfigError("reduced energy: b must be >= 0");
    if (sigma != 1 && sigma != -1) throw ConfigError("reduced energy: sigma must be +-1");
    const Grid2D& g = u.grid;
    const double tol = 1e-9 * std::max(1.0, R);
    if (std::abs(g.origin.x + 0.5 * R) > tol || std::abs(g.origin.y + 0.5 * R) > tol ||
        std::abs(g.side_x() - R) > tol || std::abs(g.side_y() - R) > tol) {
        throw ConfigError("reduced energy: grid does not cover Q_R centered at origin");
    }
}

// sin/cos of the sigma=+1 link angle for the canonical potential A0 on Q_R.
// sigma enters only as a sign on the sine, so conjugation is bit-exact.
struct A0Links {
    std::vector<double> cx, sx, cy, sy;

    explicit A0Links(const Grid2D& g) {
        cx.resize((g.nx - 1) * g.ny);
        sx.resize((g.nx - 1) * g.ny);
        cy.resize(g.nx * (g.ny - 1));
        sy.resize(g.nx * (g.ny - 1));
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.origin.y + j * g.h;
            const double th = g.h * (-0.5 * y);  // A0.x constant along x-edges
            for (int i = 0; i + 1 < g.nx; ++i) {
                cx[j * (g.nx - 1) + i] = std::cos(th);
                sx[j * (g.nx - 1) + i] = std::sin(th);
            }
        }
        for (int j = 0; j + 1 < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.origin.x + i * g.h;
                const double th = g.h * (0.5 * x);  // A0.y constant along y-edges
                cy[j * g.nx + i] = std::cos(th);
                sy[j * g.nx + i] = std::sin(th);
            }
        }
    }
};

}  // namespace

PlaquetteField sample_plaquette(const MagneticProfile& b0, const Grid2D& grid) {
    PlaquetteField p(grid);
    for (int j = 0; j < grid.plaq_ny(); ++j) {
        for (int i = 0; i < grid.plaq_nx(); ++i) {
            p.at(i, j) = b0.value(grid.plaq_center(i, j));
        }
    }
    return p;
}

PlaquetteField magnetic_comparator(const MagneticProfile& b0, const Grid2D& grid) {
    return discrete_curl(build_F(b0, grid, 1.0));
}

double gl_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                 const MagneticProfile& b0) {
    return gl_energy(psi, a, prm, magnetic_comparator(b0, psi.grid));
}

double gl_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                 const PlaquetteField& b0_plaq) {
    check_pair(psi, a, prm);
    const Grid2D& g = psi.grid;
    const double h = g.h;
    const double k2 = prm.kappa * prm.kappa;
    const double lam2 = prm.link_scale() * prm.link_scale();

    Kahan acc;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th = x_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            const Complex d = (u * psi.at(i + 1, j) - psi.at(i, j)) / h;
            acc.add(x_edge_weight(g, i, j) * std::norm(d));
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th = y_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            const Complex d = (u * psi.at(i, j + 1) - psi.at(i, j)) / h;
            acc.add(y_edge_weight(g, i, j) * std::norm(d));
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double m2 = std::norm(psi.at(i, j));
            acc.add(g.node_weight(i, j) * k2 * (-m2 + 0.5 * m2 * m2));
        }
    }
    // same per-plaquette expression as the gradient path, term for term
    for (int j = 0; j < g.plaq_ny(); ++j) {
        for (int i = 0; i < g.plaq_nx(); ++i) {
            const int p1 = g.id(i, j);
            const int p2 = g.id(i + 1, j);
            const int p3 = g.id(i + 1, j + 1);
            const int p4 = g.id(i, j + 1);
            const double circ =
                h * 0.5 *
                ((a.ax[p1] + a.ax[p2]) + (a.ay[p2] + a.ay[p3]) -
                 (a.ax[p4] + a.ax[p3]) - (a.ay[p1] + a.ay[p4]));
            const double r = circ / (h * h) - b0_plaq.at(i, j);
            acc.add(lam2 * h * h * r * r);
        }
    }
    return acc.sum;
}

ScalarField energy_density(const ComplexField& psi, const GaugeField& a,
                           const GLParams& prm) {
    check_pair(psi, a, prm);
    const Grid2D& g = psi.grid;
    const double h = g.h;
    const double k2 = prm.kappa * prm.kappa;

    // Half of each squared edge difference is scattered to its endpoints.
    std::vector<double> kin(g.num_nodes(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th = x_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            const Complex d = (u * psi.at(i + 1, j) - psi.at(i, j)) / h;
            const double half = 0.5 * x_edge_weight(g, i, j) * std::norm(d);
            kin[g.id(i, j)] += half;
            kin[g.id(i + 1, j)] += half;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th = y_link_theta(a, i, j);
            const Complex u{std::cos(th), -std::sin(th)};
            const Complex d = (u * psi.at(i, j + 1) - psi.at(i, j)) / h;
            const double half = 0.5 * y_edge_weight(g, i, j) * std::norm(d);
            kin[g.id(i, j)] += half;
            kin[g.id(i, j + 1)] += half;
        }
    }

    ScalarField e(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double m2 = std::norm(psi.at(i, j));
            e.at(i, j) = kin[g.id(i, j)] / g.node_weight(i, j) - k2 * m2 +
                         0.5 * k2 * m2 * m2;
        }
    }
    return e;
}

double local_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                    const IndexRect& rect) {
    check_rect(psi.grid, rect);
    const ScalarField e = energy_density(psi, a, prm);
    return integrate(e, rect);
}

double reduced_energy(const ComplexField& u, double b, int sigma, double R) {
    check_reduced(u, b, sigma, R);
    const Grid2D& g = u.grid;
    const double h = g.h;
    const double sg = static_cast<double>(sigma);

    // loop order and term grouping match reduced_energy_grad exactly
    Kahan acc;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.origin.y + j * g.h;
        const double th = h * (-0.5 * y);
        const Complex uu{std::cos(th), -sg * std::sin(th)};
        for (int i = 0; i + 1 < g.nx; ++i) {
            const Complex d = (uu * u.at(i + 1, j) - u.at(i, j)) / h;
            acc.add(b * x_edge_weight(g, i, j) * std::norm(d));
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.origin.x + i * g.h;
            const double th = h * (0.5 * x);
            const Complex uu{std::cos(th), -sg * std::sin(th)};
            const Complex d = (uu * u.at(i, j + 1) - u.at(i, j)) / h;
            acc.add(b * y_edge_weight(g, i, j) * std::norm(d));
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double m2 = std::norm(u.at(i, j));
            acc.add(g.node_weight(i, j) * (-m2 + 0.5 * m2 * m2));
        }
    }
    return acc.sum;
}

double reduced_energy_grad(const ComplexField& u, double b, int sigma, double R,
                           std::vector<Complex>& dpsi) {
    check_reduced(u, b, sigma, R);
    const Grid2D& g = u.grid;
    const double h = g.h;
    const double sg = static_cast<double>(sigma);
    static thread_local Grid2D cached_grid{};
    static thread_local std::unique_ptr<A0Links> links;
    if (!links || !cached_grid.same_as(g)) {
        links = std::make_unique<A0Links>(g);
        cached_grid = g;
    }

    dpsi.assign(g.num_nodes(), Complex{0.0, 0.0});
    Kahan acc;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int e = j * (g.nx - 1) + i;
            const Complex uu{links->cx[e], -sg * links->sx[e]};
            const Complex d = (uu * u.at(i + 1, j) - u.at(i, j)) / h;
            const double w = x_edge_weight(g, i, j);
            acc.add(b * w * std::norm(d));
            dpsi[g.id(i, j)] += 2.0 * b * w * (-d / h);
            dpsi[g.id(i + 1, j)] += 2.0 * b * w * (std::conj(uu) * d / h);
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int e = j * g.nx + i;
            const Complex uu{links->cy[e], -sg * links->sy[e]};
            const Complex d = (uu * u.at(i, j + 1) - u.at(i, j)) / h;
            const double w = y_edge_weight(g, i, j);
            acc.add(b * w * std::norm(d));
            dpsi[g.id(i, j)] += 2.0 * b * w * (-d / h);
            dpsi[g.id(i, j + 1)] += 2.0 * b * w * (std::conj(uu) * d / h);
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int n = g.id(i, j);
            const double w = g.node_weight(i, j);
            const double m2 = std::norm(u.v[n]);
            acc.add(w * (-m2 + 0.5 * m2 * m2));
            dpsi[n] += 2.0 * w * (m2 - 1.0) * u.v[n];
        }
    }
    return acc.sum;
}

double gl_energy_grad(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const PlaquetteField& b0_plaq, GlGradient& out) {
    check_pair(psi, a, prm);
    const Grid2D& g = psi.grid;
    const double h = g.h;
    const double k2 = prm.kappa * prm.kappa;
    const double lam = prm.link_scale();
    const double lam2 = lam * lam;

    out.dpsi.assign(g.num_nodes(), Complex{0.0, 0.0});
    out.dax.assign(g.num_nodes(), 0.0);
    out.day.assign(g.num_nodes(), 0.0);

    // energy terms accumulate exactly as in gl_energy so that line-search
    // energies and gradient-step energies agree bit for bit
    Kahan acc;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th = x_link_theta(a, i, j);
            const Complex uu{std::cos(th), -std::sin(th)};
            const Complex uq = uu * psi.at(i + 1, j);
            const Complex d = (uq - psi.at(i, j)) / h;
            const double w = x_edge_weight(g, i, j);
            acc.add(w * std::norm(d));
            out.dpsi[g.id(i, j)] += 2.0 * w * (-d / h);
            out.dpsi[g.id(i + 1, j)] += 2.0 * w * (std::conj(uu) * d / h);
            // dK/dtheta scattered to both endpoint ax values
            const double dth = 2.0 * (w / h) * std::imag(uq * std::conj(d));
            const double das = dth * lam * h * 0.5;
            out.dax[g.id(i, j)] += das;
            out.dax[g.id(i + 1, j)] += das;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th = y_link_theta(a, i, j);
            const Complex uu{std::cos(th), -std::sin(th)};
            const Complex uq = uu * psi.at(i, j + 1);
            const Complex d = (uq - psi.at(i, j)) / h;
            const double w = y_edge_weight(g, i, j);
            acc.add(w * std::norm(d));
            out.dpsi[g.id(i, j)] += 2.0 * w * (-d / h);
            out.dpsi[g.id(i, j + 1)] += 2.0 * w * (std::conj(uu) * d / h);
            const double dth = 2.0 * (w / h) * std::imag(uq * std::conj(d));
            const double das = dth * lam * h * 0.5;
            out.day[g.id(i, j)] += das;
            out.day[g.id(i, j + 1)] += das;
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int n = g.id(i, j);
            const double w = g.node_weight(i, j);
            const double m2 = std::norm(psi.v[n]);
            acc.add(w * k2 * (-m2 + 0.5 * m2 * m2));
            out.dpsi[n] += 2.0 * w * k2 * (m2 - 1.0) * psi.v[n];
        }
    }
    for (int j = 0; j < g.plaq_ny(); ++j) {
        for (int i = 0; i < g.plaq_nx(); ++i) {
            const int p1 = g.id(i, j);
            const int p2 = g.id(i + 1, j);
            const int p3 = g.id(i + 1, j + 1);
            const int p4 = g.id(i, j + 1);
            const double circ =
                h * 0.5 *
                ((a.ax[p1] + a.ax[p2]) + (a.ay[p2] + a.ay[p3]) -
                 (a.ax[p4] + a.ax[p3]) - (a.ay[p1] + a.ay[p4]));
            const double r = circ / (h * h) - b0_plaq.at(i, j);
            acc.add(lam2 * h * h * r * r);
            const double s = lam2 * h * r;  // d(mag)/d(edge-average entries)
            out.dax[p1] += s;
            out.dax[p2] += s;
            out.dax[p3] -= s;
            out.dax[p4] -= s;
            out.day[p2] += s;
            out.day[p3] += s;
            out.day[p1] -= s;
            out.day[p4] -= s;
        }
    }

    return acc.sum;
}

GlGradient gl_gradient(const ComplexField& psi, const GaugeField& a,
                       const GLParams& prm, const MagneticProfile& b0) {
    GlGradient out;
    gl_energy_grad(psi, a, prm, magnetic_comparator(b0, psi.grid), out);
    return out;
}

double psi4_flux_term(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const IndexRect& rect) {
    check_pair(psi, a, prm);
    check_rect(psi.grid, rect);
    const Grid2D& g = psi.grid;
    const double h = g.h;
    const double k2 = prm.kappa * prm.kappa;

    // Per-node split of the kinetic quadrature (k) and of the kinetic part of
    // Re(conj(psi) * grad) (t); their whole-domain sums agree.
    std::vector<double> k(g.num_nodes(), 0.0), t(g.num_nodes(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th = x_link_theta(a, i, j);
            const Complex uu{std::cos(th), -std::sin(th)};
            const Complex uq = uu * psi.at(i + 1, j);
            const Complex d = (uq - psi.at(i, j)) / h;
            const double w = x_edge_weight(g, i, j);
            k[g.id(i, j)] += 0.5 * w * std::norm(d);
            k[g.id(i + 1, j)] += 0.5 * w * std::norm(d);
            t[g.id(i, j)] += -(w / h) * std::real(d * std::conj(psi.at(i, j)));
            t[g.id(i + 1, j)] += (w / h) * std::real(d * std::conj(uq));
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th = y_link_theta(a, i, j);
            const Complex uu{std::cos(th), -std::sin(th)};
            const Complex uq = uu * psi.at(i, j + 1);
            const Complex d = (uq - psi.at(i, j)) / h;
            const double w = y_edge_weight(g, i, j);
            k[g.id(i, j)] += 0.5 * w * std::norm(d);
            k[g.id(i, j + 1)] += 0.5 * w * std::norm(d);
            t[g.id(i, j)] += -(w / h) * std::real(d * std::conj(psi.at(i, j)));
            t[g.id(i, j + 1)] += (w / h) * std::real(d * std::conj(uq));
        }
    }

    double s = 0.0;
    for (int j = rect.j0; j <= rect.j1; ++j) {
        for (int i = rect.i0; i <= rect.i1; ++i) {
            const int n = g.id(i, j);
            const double w = g.node_weight(i, j);
            const double wd = rect_node_weight(g, rect, i, j);
            const double m2 = std::norm(psi.v[n]);
            s += (wd / w) * k[n] - t[n] + k2 * (w - wd) * (m2 - m2 * m2);
        }
    }
    return s;
}

}  // namespace glvar
