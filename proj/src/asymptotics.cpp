#include "glvar/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace glvar {

namespace {

constexpr int kSubSamples = 9;   // per-cell sampling lattice for inf/sup
constexpr int kCellQuad = 17;    // per-cell trapezoid points per direction

// Trapezoidal quadrature of f over the square Q_ell(center).
double cell_quadrature(Point center, double ell, const std::function<double(Point)>& f) {
    const int m = kCellQuad;
    const double hq = ell / (m - 1);
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
        const double wy = (j == 0 || j == m - 1) ? 0.5 : 1.0;
        for (int i = 0; i < m; ++i) {
            const double wx = (i == 0 || i == m - 1) ? 0.5 : 1.0;
            const Point p{center.x - 0.5 * ell + i * hq, center.y - 0.5 * ell + j * hq};
            s += wx * wy * hq * hq * f(p);
        }
    }
    return s;
}

Complex bilerp(const ComplexField& f, Point p) {
    const Grid2D& g = f.grid;
    const double sx = (p.x - g.origin.x) / g.h;
    const double sy = (p.y - g.origin.y) / g.h;
    if (sx < -1e-9 || sy < -1e-9 || sx > g.nx - 1 + 1e-9 || sy > g.ny - 1 + 1e-9) {
        return Complex{0.0, 0.0};
    }
    const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, g.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, g.ny - 2);
    const double tx = std::clamp(sx - i, 0.0, 1.0);
    const double ty = std::clamp(sy - j, 0.0, 1.0);
    return (1 - tx) * (1 - ty) * f.at(i, j) + tx * (1 - ty) * f.at(i + 1, j) +
           (1 - tx) * ty * f.at(i, j + 1) + tx * ty * f.at(i + 1, j + 1);
}

}  // namespace

Lattice build_lattice(const MagneticProfile& b0, const Grid2D& domain, double ell,
                      double eps) {
    if (!(ell > 0.0) || ell >= std::min(domain.side_x(), domain.side_y())) {
        throw ConfigError("build_lattice: cell side must be positive and smaller than the domain");
    }
    if (eps < 0.0) throw ConfigError("build_lattice: eps must be >= 0");

    Lattice lat;
    lat.ell = ell;
    lat.eps = eps;
    lat.origin = domain.origin;
    lat.side_x = domain.side_x();
    lat.side_y = domain.side_y();

    const int ncx = static_cast<int>(std::floor(lat.side_x / ell + 1e-9));
    const int ncy = static_cast<int>(std::floor(lat.side_y / ell + 1e-9));
    const double step = ell / (kSubSamples - 1);
    // farthest distance from any cell point to the sampling lattice
    const double reach = 0.5 * std::sqrt(2.0) * step;

    for (int cj = 0; cj < ncy; ++cj) {
        for (int ci = 0; ci < ncx; ++ci) {
            const Point c{domain.origin.x + (ci + 0.5) * ell,
                          domain.origin.y + (cj + 0.5) * ell};
            double vmin = std::numeric_limits<double>::infinity();
            double vmax = 0.0;
            double lip = 0.0;
            Point argmin = c;
            bool pos = true, neg = true;
            for (int j = 0; j < kSubSamples; ++j) {
                for (int i = 0; i < kSubSamples; ++i) {
                    const Point p{c.x - 0.5 * ell + i * step, c.y - 0.5 * ell + j * step};
                    const double val = b0.value(p);
                    const double av = std::abs(val);
                    if (av < vmin) {
                        vmin = av;
                        argmin = p;
                    }
                    vmax = std::max(vmax, av);
                    lip = std::max(lip, norm(b0.grad(p)));
                    pos = pos && val > 0.0;
                    neg = neg && val < 0.0;
                }
            }
            const double pad = lip * reach;
            if (!(vmin - pad > eps) || (!pos && !neg)) continue;
            LatticeCell cell;
            cell.center = c;
            cell.b_inf = std::max(0.0, vmin - pad);
            cell.b_sup = vmax + pad;
            cell.min_abs = vmin;
            cell.argmin = argmin;
            cell.sigma = pos ? +1 : -1;
            lat.cells.push_back(cell);
        }
    }
    lat.excluded_measure = lat.side_x * lat.side_y - lat.covered_measure();
    return lat;
}

double bulk_prediction(const GLParams& prm, const MagneticProfile& b0,
                       const GTable& table, const Grid2D& fine_grid) {
    prm.validate();
    const double ratio = prm.b_ratio();
    const double k2 = prm.kappa * prm.kappa;
    return k2 * integrate(fine_grid, [&](Point p) {
               return g_eval(table, ratio * std::abs(b0.value(p)));
           });
}

double bulk_prediction_rect(const GLParams& prm, const MagneticProfile& b0,
                            const GTable& table, const Grid2D& grid,
                            const IndexRect& rect) {
    prm.validate();
    check_rect(grid, rect);
    const double ratio = prm.b_ratio();
    const double k2 = prm.kappa * prm.kappa;
    double s = 0.0;
    for (int j = rect.j0; j <= rect.j1; ++j) {
        for (int i = rect.i0; i <= rect.i1; ++i) {
            s += rect_node_weight(grid, rect, i, j) *
                 g_eval(table, ratio * std::abs(b0.value(grid.node(i, j))));
        }
    }
    return k2 * s;
}

double bulk_prediction_lattice(const GLParams& prm, const MagneticProfile& b0,
                               const GTable& table, const Lattice& lat) {
    prm.validate();
    const double ratio = prm.b_ratio();
    const double k2 = prm.kappa * prm.kappa;
    double s = 0.0;
    for (const LatticeCell& cell : lat.cells) {
        s += cell_quadrature(cell.center, lat.ell, [&](Point p) {
            return g_eval(table, ratio * std::abs(b0.value(p)));
        });
    }
    return k2 * s;
}

std::pair<double, double> riemann_bounds(const GLParams& prm, const GTable& table,
                                         const Lattice& lat) {
    prm.validate();
    if (lat.cells.empty()) {
        throw ConfigError("riemann_bounds: lattice has no admissible cells");
    }
    const double ratio = prm.b_ratio();
    const double k2 = prm.kappa * prm.kappa;
    const double area = lat.ell * lat.ell;
    // g is non-decreasing, so the per-cell infimum of g((H/kappa)|B0|) sits at
    // B_inf: that sum is the lower Riemann sum, the B_sup sum the upper one.
    double lower = 0.0, upper = 0.0;
    for (const LatticeCell& cell : lat.cells) {
        lower += k2 * area * g_eval(table, ratio * cell.b_inf);
        upper += k2 * area * g_eval(table, ratio * cell.b_sup);
    }
    return {lower, upper};
}

TrialState tiled_trial_state(const GLParams& prm, const MagneticProfile& b0,
                             const GaugeField& F, const Lattice& lat, double h_target,
                             const MinimizeOptions& opts) {
    prm.validate();
    const Grid2D& g = F.grid;
    TrialState out;
    out.v = ComplexField(g);

    std::map<long long, ReducedResult> cache;  // keyed by b rounded to 1e-3
    const double lam = prm.link_scale();

    for (const LatticeCell& cell : lat.cells) {
        const double b_cell = prm.b_ratio() * cell.min_abs;
        const long long key = std::llround(b_cell * 1000.0);
        const double b_q = static_cast<double>(key) / 1000.0;
        if (b_q >= 1.0) continue;  // cell minimizer is zero
        const double R_q = lat.ell * prm.kappa * std::sqrt(b_q);
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, minimize_reduced(b_q, +1, R_q, h_target, opts)).first;
        }
        const ReducedResult& rr = it->second;
        out.all_converged = out.all_converged && rr.converged;
        if (rr.m0 == 0.0) continue;
        ++out.cells_used;

        const LocalGaugePhase lgp = local_gauge_phase(F, cell.center, cell.argmin, lat.ell);
        const double scale = R_q / lat.ell;
        for (int j = lgp.cell.j0; j <= lgp.cell.j1; ++j) {
            for (int i = lgp.cell.i0; i <= lgp.cell.i1; ++i) {
                const Point x = g.node(i, j);
                const Point y = scale * (x - cell.center);
                Complex uval = bilerp(rr.u, y);
                if (cell.sigma < 0) uval = std::conj(uval);
                const double th = lam * lgp.phi.at(i, j);
                out.v.at(i, j) = Complex{std::cos(th), std::sin(th)} * uval;
            }
        }
    }

    out.energy = gl_energy(out.v, F, prm, b0);
    return out;
}

Psi4Record psi4_check(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const MagneticProfile& b0, const GTable& table,
                      const IndexRect& rect) {
    Psi4Record rec;
    ScalarField p4(psi.grid);
    for (int k = 0; k < psi.grid.num_nodes(); ++k) {
        const double m2 = std::norm(psi.v[k]);
        p4.v[k] = m2 * m2;
    }
    rec.lhs = integrate(p4, rect);
    rec.rhs = -2.0 * bulk_prediction_rect(prm, b0, table, psi.grid, rect) /
              (prm.kappa * prm.kappa);
    const double e0 = local_energy(psi, a, prm, rect);
    const double flux = psi4_flux_term(psi, a, prm, rect);
    rec.identity_residual =
        std::abs(e0 + 0.5 * prm.kappa * prm.kappa * rec.lhs - flux);
    return rec;
}

LocalEnergyRecord local_energy_compare(const ComplexField& psi, const GaugeField& a,
                                       const GLParams& prm, const MagneticProfile& b0,
                                       const GTable& table, const IndexRect& rect) {
    LocalEnergyRecord rec;
    const PlaquetteField b0p = magnetic_comparator(b0, psi.grid);
    const PlaquetteField curl = discrete_curl(a);
    double mag = 0.0;
    const Grid2D& g = psi.grid;
    for (int j = 0; j < g.plaq_ny(); ++j) {
        for (int i = 0; i < g.plaq_nx(); ++i) {
            const double r = curl.at(i, j) - b0p.at(i, j);
            mag += g.h * g.h * r * r;
        }
    }
    rec.measured = local_energy(psi, a, prm, rect) +
                   prm.link_scale() * prm.link_scale() * mag;
    rec.predicted = bulk_prediction_rect(prm, b0, table, g, rect);
    rec.gap = std::abs(rec.measured - rec.predicted) / (prm.kappa * prm.kappa);
    return rec;
}

}  // namespace glvar
