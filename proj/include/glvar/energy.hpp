#pragma once

#include "glvar/grid.hpp"

namespace glvar {

struct GLParams {
    double kappa = 1.0;
    double H = 1.0;

    void validate() const {
        if (!(kappa > 0.0) || !(H > 0.0) || !std::isfinite(kappa) || !std::isfinite(H)) {
            throw ConfigError("GLParams: kappa and H must be finite and positive");
        }
    }
    double b_ratio() const { return H / kappa; }
    double link_scale() const { return kappa * H; }
};

/// B0 sampled at plaquette centers, matching the staggering of discrete_curl.
PlaquetteField sample_plaquette(const MagneticProfile& b0, const Grid2D& grid);

/// Plaquette comparator for the magnetic term: the discrete curl of the
/// reference potential built from B0. Equals the plaquette-center samples of
/// B0 up to O(h^2) away from the rectangle corners; using it instead of raw
/// samples makes the magnetic term exactly (kappa H)^2 |curl(A - F)|^2 and
/// keeps the corner cells of the Dirichlet stream function from injecting a
/// spurious O((kappa H)^2 h^2) energy.
PlaquetteField magnetic_comparator(const MagneticProfile& b0, const Grid2D& grid);

/// Full functional: kinetic + potential terms over nodes/edges plus
/// (kappa H)^2 * integral of |curl A - curl F|^2 over plaquettes.
double gl_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                 const MagneticProfile& b0);
double gl_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                 const PlaquetteField& b0_plaq);

/// Node-centered energy density e(psi,A); integrates back to the local energy.
ScalarField energy_density(const ComplexField& psi, const GaugeField& a,
                           const GLParams& prm);

/// Restricted quadrature of the energy density over a node rectangle.
double local_energy(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                    const IndexRect& rect);

/// Reduced cell energy G^sigma_{b,Q_R}(u) for u vanishing on the boundary of
/// the square Q_R centered at the origin, with the canonical potential A0.
double reduced_energy(const ComplexField& u, double b, int sigma, double R);

struct GlGradient {
    std::vector<Complex> dpsi;
    std::vector<double> dax, day;
};

/// Exact gradient of the discrete gl_energy with respect to node values.
GlGradient gl_gradient(const ComplexField& psi, const GaugeField& a,
                       const GLParams& prm, const MagneticProfile& b0);

/// Fused energy + gradient evaluation (the optimizer hot path).
double gl_energy_grad(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const PlaquetteField& b0_plaq, GlGradient& out);

/// Fused reduced energy + gradient with respect to u.
double reduced_energy_grad(const ComplexField& u, double b, int sigma, double R,
                           std::vector<Complex>& dpsi);

/// Quadrature/flux correction B(D) such that, at any discrete critical point,
/// local_energy(D) + (kappa^2/2) * int_D |psi|^4 = B(D) exactly. Vanishes for
/// D equal to the whole grid.
double psi4_flux_term(const ComplexField& psi, const GaugeField& a, const GLParams& prm,
                      const IndexRect& rect);

}  // namespace glvar
