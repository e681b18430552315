#pragma once

#include <cstdint>

#include "glvar/energy.hpp"
#include "glvar/potential.hpp"

namespace glvar {

struct MinimizeOptions {
    int max_iters = 20000;
    double grad_tol = 1e-8;     // relative gradient-norm stop
    std::uint64_t seed = 1;
    int restarts = 3;
    double shrink = 0.5;        // backtracking factor
    double armijo_c = 1e-4;     // sufficient-decrease constant

    void validate() const {
        if (!(grad_tol > 0.0)) throw ConfigError("MinimizeOptions: grad_tol must be > 0");
        if (restarts < 1) throw ConfigError("MinimizeOptions: restarts must be >= 1");
        if (max_iters < 1) throw ConfigError("MinimizeOptions: max_iters must be >= 1");
    }
};

struct ReducedResult {
    ComplexField u;
    double m0 = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Minimizes G^sigma_{b,Q_R} over fields vanishing on the boundary of Q_R,
/// by Polak-Ribiere conjugate gradients with Armijo backtracking, taking the
/// best of `opts.restarts` seeded random starts. m0 <= 0 always (u = 0 is
/// feasible). Non-convergence is reported through the flag, never thrown.
ReducedResult minimize_reduced(double b, int sigma, double R, double h_target,
                               const MinimizeOptions& opts);

struct CriticalityReport {
    double grad_norm = 0.0;
    double sup_psi = 0.0;
    double kinetic_over_l2 = 0.0;
    double magnetic_energy = 0.0;
    double energy = 0.0;
    double psi4_integral = 0.0;
    bool sup_ok = true;      // sup |psi| <= 1 + 1e-6
    bool kinetic_ok = true;  // ||(grad - i kappa H A) psi|| <= 1.02 kappa ||psi||
};

struct FullResult {
    ComplexField psi;
    GaugeField A;
    ScalarField w;  // stream function, A = F + (d_y w, -d_x w)
    GaugeField F;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
    CriticalityReport report;
};

/// Minimizes the full functional over (psi, A) with A = F + perp-grad of a
/// stream function vanishing on the boundary, alternating conjugate-gradient
/// blocks over psi and over the stream function.
FullResult minimize_full(const GLParams& prm, const MagneticProfile& b0,
                         const Grid2D& grid, const MinimizeOptions& opts);

/// A priori diagnostics of a configuration (maximum-principle bound, kinetic
/// bound, magnetic energy).
CriticalityReport criticality_report(const ComplexField& psi, const GaugeField& a,
                                     const GLParams& prm, const MagneticProfile& b0);

}  // namespace glvar
