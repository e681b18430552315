#pragma once

#include <utility>

#include "glvar/grid.hpp"

namespace glvar {

struct PoissonResult {
    ScalarField f;
    double residual = 0.0;  // relative residual at exit
    int iterations = 0;
};

/// Solves -Lap_h f = rhs with homogeneous Dirichlet data by conjugate
/// gradients on the 5-point stencil. Throws NumericError if the relative
/// residual does not reach `tol` within `max_iters` (default 10*nx*ny).
PoissonResult solve_poisson_dirichlet(const Grid2D& grid, const ScalarField& rhs,
                                      double tol = 1e-10, int max_iters = -1);

/// Divergence-free potential with curl F = B0 and zero normal trace:
/// F = (d_y f, -d_x f) where -Lap f = B0, f = 0 on the boundary.
GaugeField build_F(const MagneticProfile& b0, const Grid2D& grid, double link_scale);

/// Canonical potential (-x2/2, x1/2) with unit curl.
inline Point canonical_A0(Point p) { return {-0.5 * p.y, 0.5 * p.x}; }

/// Node samples of coeff * A0(x - center) as a gauge field.
GaugeField canonical_A0_field(const Grid2D& grid, Point center, double coeff,
                              double link_scale);

/// Quadratic-plus-linear gauge phase splitting F locally around a cell:
/// F ~ grad(phi) + B0(xt) * A0(x - x0) + O(ell^2) on Q_ell(x0).
struct LocalGaugePhase {
    IndexRect cell;        // host-grid nodes covered by Q_ell(x0)
    ScalarField phi;       // phase samples on the host grid (zero off-cell)
    double err = 0.0;      // max node residual of the splitting over the cell
    Point xt_used;         // Taylor point after snapping to the nearest node
    double b0_at_xt = 0.0; // numeric curl F at the Taylor point (signed)
};

/// Builds the phase by Taylor expansion of F at xt (snapped to the nearest
/// grid node; Jacobian by centered differences with step h).
LocalGaugePhase local_gauge_phase(const GaugeField& F, Point x0, Point xt, double ell);

/// psi' = psi * exp(-i scale phi), A' = A - grad_h phi.
std::pair<ComplexField, GaugeField> gauge_transform(const ComplexField& psi,
                                                    const GaugeField& a,
                                                    const ScalarField& phi,
                                                    double scale);

}  // namespace glvar
