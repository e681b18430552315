#include "doctest.h"

#include <cmath>

#include "glvar/energy.hpp"
#include "glvar/potential.hpp"
#include "glvar/profiles.hpp"
#include "glvar/rng.hpp"

using namespace glvar;

namespace {

ComplexField random_complex(const Grid2D& g, std::uint64_t seed, double amp = 1.0,
                            Bc bc = Bc::Free) {
    Rng rng(seed);
    ComplexField f(g, bc);
    for (Complex& z : f.v) z = Complex{rng.next_symmetric(amp), rng.next_symmetric(amp)};
    f.enforce_bc();
    return f;
}

GaugeField random_gauge(const Grid2D& g, double scale, std::uint64_t seed, double amp = 1.0) {
    Rng rng(seed);
    GaugeField a(g, scale);
    for (int k = 0; k < g.num_nodes(); ++k) {
        a.ax[k] = rng.next_symmetric(amp);
        a.ay[k] = rng.next_symmetric(amp);
    }
    return a;
}

// Straight-line re-computation of the full functional, kept deliberately
// separate from the library path. b0p is the plaquette comparator.
double direct_gl_energy(const ComplexField& psi, const GaugeField& a, double kappa,
                        double H, const PlaquetteField& b0p) {
    const Grid2D& g = psi.grid;
    const double lam = kappa * H;
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double th =
                lam * g.h * 0.5 * (a.ax[g.id(i, j)] + a.ax[g.id(i + 1, j)]);
            const Complex d =
                (std::exp(Complex{0, -th}) * psi.at(i + 1, j) - psi.at(i, j)) / g.h;
            const double w = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
            total += g.h * g.h * w * std::norm(d);
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double th =
                lam * g.h * 0.5 * (a.ay[g.id(i, j)] + a.ay[g.id(i, j + 1)]);
            const Complex d =
                (std::exp(Complex{0, -th}) * psi.at(i, j + 1) - psi.at(i, j)) / g.h;
            const double w = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            total += g.h * g.h * w * std::norm(d);
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
            const double m2 = std::norm(psi.at(i, j));
            total += g.h * g.h * wx * wy * kappa * kappa * (-m2 + 0.5 * m2 * m2);
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double circ =
                g.h * 0.5 *
                ((a.ax[g.id(i, j)] + a.ax[g.id(i + 1, j)]) +
                 (a.ay[g.id(i + 1, j)] + a.ay[g.id(i + 1, j + 1)]) -
                 (a.ax[g.id(i, j + 1)] + a.ax[g.id(i + 1, j + 1)]) -
                 (a.ay[g.id(i, j)] + a.ay[g.id(i, j + 1)]));
            const double r = circ / (g.h * g.h) - b0p.at(i, j);
            total += lam * lam * g.h * g.h * r * r;
        }
    }
    return total;
}

double magnetic_term(const GaugeField& a, const GLParams& prm, const MagneticProfile& b0) {
    const Grid2D& g = a.grid;
    const PlaquetteField curl = discrete_curl(a);
    const PlaquetteField b0p = magnetic_comparator(b0, g);
    double mag = 0.0;
    for (int k = 0; k < g.num_plaquettes(); ++k) {
        const double r = curl.v[k] - b0p.v[k];
        mag += g.h * g.h * r * r;
    }
    return prm.link_scale() * prm.link_scale() * mag;
}

}  // namespace

TEST_CASE("gl_energy on reference configurations") {
    const GLParams prm{2.0, 1.5};
    const MagneticProfile one = make_profile("constant(1)");

    // (0, F): every term is the discretization residual of curl F = B0
    const Grid2D g = make_grid({0, 0}, 1, 1, 65, 65);
    const GaugeField F = build_F(one, g, prm.link_scale());
    const ComplexField zero(g);
    const double e_vac = gl_energy(zero, F, prm, one);
    CHECK(e_vac >= 0.0);
    CHECK(e_vac < 1e-6 * prm.link_scale() * prm.link_scale() * g.h * g.h);

    // B0 = 0, psi = 1, A = 0: exactly -kappa^2 |Omega| / 2
    MagneticProfile zfield;
    zfield.value = [](Point) { return 0.0; };
    zfield.grad = [](Point) { return Point{0, 0}; };
    ComplexField ones(g);
    for (Complex& z : ones.v) z = 1.0;
    const GaugeField a0(g, prm.link_scale());
    CHECK(gl_energy(ones, a0, prm, zfield) ==
          doctest::Approx(-0.5 * prm.kappa * prm.kappa).epsilon(1e-12));

    CHECK_THROWS_AS(gl_energy(ones, GaugeField(g, 1.0), prm, one), ConfigError);
}

TEST_CASE("gl_energy equals a direct summation on random data") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 8, 8);
    const GLParams prm{1.7, 2.3};
    const MagneticProfile b0 = make_profile("linear(1,-0.4)");
    const PlaquetteField b0p = magnetic_comparator(b0, g);
    const ComplexField psi = random_complex(g, 31);
    const GaugeField a = random_gauge(g, prm.link_scale(), 32);
    const double lib = gl_energy(psi, a, prm, b0p);
    const double ref = direct_gl_energy(psi, a, prm.kappa, prm.H, b0p);
    CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
    CHECK(gl_energy(psi, a, prm, b0) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("energy_density integrates back to the local energy") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 17, 17);
    const GLParams prm{3.0, 1.0};
    const MagneticProfile b0 = make_profile("constant(1)");

    const ComplexField zero(g);
    const GaugeField a = random_gauge(g, prm.link_scale(), 41);
    for (double v : energy_density(zero, a, prm).v) CHECK(v == 0.0);

    ComplexField ones(g);
    for (Complex& z : ones.v) z = 1.0;
    const GaugeField azero(g, prm.link_scale());
    for (double v : energy_density(ones, azero, prm).v) {
        CHECK(v == doctest::Approx(-0.5 * prm.kappa * prm.kappa).epsilon(1e-13));
    }

    const ComplexField psi = random_complex(g, 42);
    const double e0 = integrate(energy_density(psi, a, prm));
    const double direct = gl_energy(psi, a, prm, b0) - magnetic_term(a, prm, b0);
    CHECK(e0 == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("local_energy: whole domain and quadrant partition") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 17, 17);
    const GLParams prm{2.0, 2.0};
    const MagneticProfile b0 = make_profile("constant(1)");
    const ComplexField psi = random_complex(g, 55);
    const GaugeField a = random_gauge(g, prm.link_scale(), 56);

    const double whole = local_energy(psi, a, prm, full_rect(g));
    CHECK(whole ==
          doctest::Approx(gl_energy(psi, a, prm, b0) - magnetic_term(a, prm, b0))
              .epsilon(1e-12));

    const double q = local_energy(psi, a, prm, {0, 8, 0, 8}) +
                     local_energy(psi, a, prm, {8, 16, 0, 8}) +
                     local_energy(psi, a, prm, {0, 8, 8, 16}) +
                     local_energy(psi, a, prm, {8, 16, 8, 16});
    CHECK(whole == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("reduced_energy: zero field, conjugation symmetry, tent oracle") {
    const double R = 8.0;
    const Grid2D g = make_grid({-R / 2, -R / 2}, R, R, 33, 33);

    const ComplexField zero(g, Bc::DirichletZero);
    CHECK(reduced_energy(zero, 0.7, +1, R) == 0.0);

    const ComplexField u = random_complex(g, 61, 0.8, Bc::DirichletZero);
    ComplexField uc = u;
    for (Complex& z : uc.v) z = std::conj(z);
    const double gp = reduced_energy(u, 0.45, +1, R);
    const double gm = reduced_energy(uc, 0.45, -1, R);
    CHECK(gp == doctest::Approx(gm).epsilon(1e-12));

    // b = 0 tent: pointwise algebra only, summed independently
    ComplexField tent(g, Bc::DirichletZero);
    double expected = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Point p = g.node(i, j);
            const double t =
                std::max(0.0, 1.0 - std::max(std::abs(p.x), std::abs(p.y)) / (R / 2));
            tent.at(i, j) = t;
            const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
            expected += g.h * g.h * wx * wy * (-t * t + 0.5 * t * t * t * t);
        }
    }
    CHECK(reduced_energy(tent, 0.0, +1, R) == doctest::Approx(expected).epsilon(1e-13));

    ComplexField wrong_bc(g, Bc::Free);
    CHECK_THROWS_AS(reduced_energy(wrong_bc, 0.5, +1, R), ConfigError);
}

TEST_CASE("gl_gradient matches central finite differences") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 9, 9);
    const GLParams prm{1.9, 1.3};
    const MagneticProfile b0 = make_profile("linear(1,-0.2)");
    const PlaquetteField b0p = sample_plaquette(b0, g);
    const int nn = g.num_nodes();

    for (std::uint64_t inst = 0; inst < 3; ++inst) {
        ComplexField psi = random_complex(g, 70 + inst);
        GaugeField a = random_gauge(g, prm.link_scale(), 80 + inst, 0.7);
        GlGradient grad;
        gl_energy_grad(psi, a, prm, b0p, grad);

        Rng rng(90 + inst);
        const double eps = 1e-5;
        for (int dir = 0; dir < 20; ++dir) {
            std::vector<double> vre(nn), vim(nn), vax(nn), vay(nn);
            for (int k = 0; k < nn; ++k) {
                vre[k] = rng.next_symmetric(1.0);
                vim[k] = rng.next_symmetric(1.0);
                vax[k] = rng.next_symmetric(1.0);
                vay[k] = rng.next_symmetric(1.0);
            }
            double gdot = 0.0;
            for (int k = 0; k < nn; ++k) {
                gdot += grad.dpsi[k].real() * vre[k] + grad.dpsi[k].imag() * vim[k] +
                        grad.dax[k] * vax[k] + grad.day[k] * vay[k];
            }
            auto shifted = [&](double s) {
                ComplexField p2 = psi;
                GaugeField a2 = a;
                for (int k = 0; k < nn; ++k) {
                    p2.v[k] += s * Complex{vre[k], vim[k]};
                    a2.ax[k] += s * vax[k];
                    a2.ay[k] += s * vay[k];
                }
                return gl_energy(p2, a2, prm, b0p);
            };
            const double fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
            CHECK(std::abs(fd - gdot) <= 1e-6 * (1.0 + std::abs(gdot)));
        }
    }
}

TEST_CASE("gl_gradient at reference critical points") {
    const GLParams prm{2.5, 1.1};
    const Grid2D g = make_grid({0, 0}, 1, 1, 33, 33);

    const MagneticProfile one = make_profile("constant(1)");
    const GaugeField F = build_F(one, g, prm.link_scale());
    const ComplexField zero(g);
    const GlGradient gr = gl_gradient(zero, F, prm, one);
    for (const Complex& z : gr.dpsi) CHECK(std::abs(z) == 0.0);
    // (0, F) is an exact critical point of the discrete functional
    for (double v : gr.dax) CHECK(v == 0.0);
    for (double v : gr.day) CHECK(v == 0.0);

    MagneticProfile zfield;
    zfield.value = [](Point) { return 0.0; };
    zfield.grad = [](Point) { return Point{0, 0}; };
    ComplexField ones(g);
    for (Complex& z : ones.v) z = 1.0;
    const GaugeField azero(g, prm.link_scale());
    const GlGradient gr2 = gl_gradient(ones, azero, prm, zfield);
    for (const Complex& z : gr2.dpsi) CHECK(std::abs(z) < 1e-14);
}

TEST_CASE("gauge invariance of gl_energy") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 33, 33);
    const GLParams prm{2.0, 1.6};
    const MagneticProfile b0 = make_profile("constant(1)");
    const ComplexField psi = random_complex(g, 99);
    const GaugeField a = random_gauge(g, prm.link_scale(), 98, 0.5);
    const double before = gl_energy(psi, a, prm, b0);

    ScalarField lin(g), xy(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Point p = g.node(i, j);
            lin.at(i, j) = 0.9 * p.x - 0.4 * p.y + 0.1;
            xy.at(i, j) = p.x * p.y;
        }
    }
    const auto [psi_l, a_l] = gauge_transform(psi, a, lin, prm.link_scale());
    CHECK(std::abs(gl_energy(psi_l, a_l, prm, b0) - before) <= 1e-10 * std::abs(before));
    const auto [psi_q, a_q] = gauge_transform(psi, a, xy, prm.link_scale());
    CHECK(std::abs(gl_energy(psi_q, a_q, prm, b0) - before) <= 1e-8 * std::abs(before));
}

TEST_CASE("cell rescaling maps the physical energy to the reduced one") {
    // u on Q_ell(x0) against sigma Bbar A0(x - x0) versus v on Q_R: the two
    // quadratures coincide on matched node sets.
    const double kappa = 3.0, H = 2.0, bbar = 0.8, ell = 0.5;
    const GLParams prm{kappa, H};
    const double b = (H / kappa) * bbar;
    const double R = ell * std::sqrt(kappa * H * bbar);
    const int n = 13;
    const Point x0{0.3, 0.7};
    const Grid2D cell = make_grid({x0.x - ell / 2, x0.y - ell / 2}, ell, ell, n, n);
    const Grid2D qr = make_grid({-R / 2, -R / 2}, R, R, n, n);

    for (int sigma : {+1, -1}) {
        ComplexField u(cell, Bc::DirichletZero);
        Rng rng(123);
        for (int j = 1; j + 1 < n; ++j) {
            for (int i = 1; i + 1 < n; ++i) {
                u.at(i, j) = Complex{rng.next_symmetric(1.0), rng.next_symmetric(1.0)};
            }
        }
        const GaugeField acell =
            canonical_A0_field(cell, x0, sigma * bbar, prm.link_scale());
        const double e_phys = local_energy(u, acell, prm, full_rect(cell));

        ComplexField v(qr, Bc::DirichletZero);
        for (int k = 0; k < qr.num_nodes(); ++k) v.v[k] = u.v[k];
        const double e_reduced = reduced_energy(v, b, sigma, R) / b;
        CHECK(e_phys == doctest::Approx(e_reduced).epsilon(1e-6));
        CHECK(e_phys == doctest::Approx(e_reduced).epsilon(1e-12));
    }
}

TEST_CASE("psi4_flux_term vanishes on the whole domain and at (0,F)") {
    const Grid2D g = make_grid({0, 0}, 1, 1, 17, 17);
    const GLParams prm{2.0, 1.0};
    const MagneticProfile one = make_profile("constant(1)");
    const ComplexField psi = random_complex(g, 111);
    const GaugeField a = random_gauge(g, prm.link_scale(), 112);
    CHECK(std::abs(psi4_flux_term(psi, a, prm, full_rect(g))) < 1e-10);

    const GaugeField F = build_F(one, g, prm.link_scale());
    const ComplexField zero(g);
    CHECK(psi4_flux_term(zero, F, prm, {2, 10, 3, 12}) == 0.0);
}
