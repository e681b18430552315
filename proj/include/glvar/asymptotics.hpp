#pragma once

#include "glvar/limit_g.hpp"

namespace glvar {

struct LatticeCell {
    Point center;
    double b_inf = 0.0;   // certified lower bound for |B0| on the cell
    double b_sup = 0.0;   // certified upper bound
    double min_abs = 0.0; // smallest sampled |B0| (trial-state convention)
    Point argmin;         // where the sampled minimum is attained
    int sigma = +1;       // sign of B0 on the cell
};

/// Cells of the square lattice with closure inside the domain intersected
/// with {|B0| > eps}. The lattice is anchored so cells tile the rectangle
/// starting at its origin.
struct Lattice {
    double ell = 0.0;
    double eps = 0.0;
    Point origin;
    double side_x = 0.0, side_y = 0.0;
    std::vector<LatticeCell> cells;
    double excluded_measure = 0.0;

    double covered_measure() const { return ell * ell * static_cast<double>(cells.size()); }
};

/// Enumerates admissible cells; per-cell bounds come from 9x9 subsampling
/// padded with a gradient-based Lipschitz margin.
Lattice build_lattice(const MagneticProfile& b0, const Grid2D& domain, double ell,
                      double eps);

/// kappa^2 * integral over the grid rectangle of g((H/kappa)|B0(x)|).
double bulk_prediction(const GLParams& prm, const MagneticProfile& b0,
                       const GTable& table, const Grid2D& fine_grid);

/// Same integrand restricted to a node rectangle.
double bulk_prediction_rect(const GLParams& prm, const MagneticProfile& b0,
                            const GTable& table, const Grid2D& grid,
                            const IndexRect& rect);

/// Same integrand over the covered region of a lattice (per-cell quadrature,
/// so it sits between the Riemann bounds exactly).
double bulk_prediction_lattice(const GLParams& prm, const MagneticProfile& b0,
                               const GTable& table, const Lattice& lat);

/// (lower, upper) Riemann sums of kappa^2 g((H/kappa)|B0|) over the lattice,
/// from the per-cell sup/inf of |B0|.
std::pair<double, double> riemann_bounds(const GLParams& prm, const GTable& table,
                                         const Lattice& lat);

struct TrialState {
    ComplexField v;
    double energy = 0.0;
    bool all_converged = true;
    int cells_used = 0;  // cells with a nonzero cell minimizer
};

/// Tiled competitor state: gauged, rescaled copies of reduced cell minimizers
/// on lattice cells (conjugated where B0 < 0), zero elsewhere; paired with F.
TrialState tiled_trial_state(const GLParams& prm, const MagneticProfile& b0,
                             const GaugeField& F, const Lattice& lat, double h_target,
                             const MinimizeOptions& opts);

struct Psi4Record {
    double lhs = 0.0;               // int_D |psi|^4
    double rhs = 0.0;               // -2 int_D g((H/kappa)|B0|)
    double identity_residual = 0.0; // |E0(D) + (kappa^2/2) lhs - flux(D)|
};

Psi4Record psi4_check(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const MagneticProfile& b0, const GTable& table,
                      const IndexRect& rect);

struct LocalEnergyRecord {
    double measured = 0.0;   // E0(psi,A;D) + (kappa H)^2 int |curl(A - F)|^2
    double predicted = 0.0;  // kappa^2 int_D g((H/kappa)|B0|)
    double gap = 0.0;        // |measured - predicted| / kappa^2
};

LocalEnergyRecord local_energy_compare(const ComplexField& psi, const GaugeField& a,
                                       const GLParams& prm, const MagneticProfile& b0,
                                       const GTable& table, const IndexRect& rect);

}  // namespace glvar
