#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "green_checks.hpp"
#include "oswald/airy.hpp"
#include "oswald/green.hpp"
#include "test_util.hpp"

using namespace oswald;

TEST_SUITE_BEGIN("green");

TEST_CASE("jump matrix: spec values, determinant, inverse pair") {
    CMat4 J = jump_matrix(2.0, 0.0, 1.0);
    CMat4 expect;
    expect << 0, 2, 0, -1, -2, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0;
    CHECK((J - expect).cwiseAbs().maxCoeff() < 1e-15);
    Cplx eps(0.3, -0.4), b(1.7, 0.2), bp(0.5, 0.0);
    CMat4 Ji = jump_matrix(b, bp, eps);
    CHECK(std::abs(Ji.determinant() - eps * eps * eps * eps) < 1e-12);
    CMat4 Jf = jump_matrix_forward(b, bp, eps);
    CHECK((Ji * Jf - CMat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("viscous Evans: constant coefficients and conjugation") {
    Profile pc = make_constant_profile(0.3);
    OSModeBasis m = build_os_modes(pc, 1.0, Cplx(2.0, 0.0), 1e4);
    Cplx mu0 = std::sqrt(1.0 + (0.3 - 2.0) / m.pt.eps());
    if (mu0.real() < 0) mu0 = -mu0;
    Cplx D = viscous_evans(m);
    CHECK(std::abs(std::abs(D) - std::abs(1.0 - 1.0 / mu0)) < 1e-4);

    // The viscous conjugation symmetry pairs (alpha, c) with (-alpha, conj c)
    // because eps = 1/(i alpha R) conjugates with the sign of alpha; it is
    // exercised at the resolvent level in the oracle suite. At fixed alpha
    // only the inviscid Evans function is Schwarz-symmetric (rayleigh suite).
}

TEST_CASE("kernel invariants at (1, 2, 1e5)") {
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), 1e5);
    Cplx eps = K.modes.pt.eps();
    double sup_g = 0.0;
    for (double x : {0.5, 1.0, 2.0})
        for (double z = 0.1; z < 8.0; z += 0.23)
            sup_g = std::max(sup_g, std::abs(K.eval(x, z)));
    for (int i = 0; i < 50; ++i) {
        double x = testutil::urand(0.05, 10.0);
        // boundary rows
        CHECK(std::abs(K.eval(x, 0.0, 0, 0)) <= 1e-6 * sup_g);
        CHECK(std::abs(K.eval(x, 0.0, 0, 1)) <= 1e-6 * sup_g * K.modes.pt.alpha * 10);
        // continuity of G, dzG, dz2G across z=x; jump of the third derivative
        CHECK(std::abs(K.jump(x, 0, 0)) < 1e-6 * std::max(std::abs(K.eval(x, x)), sup_g));
        double s1 = std::abs(K.eval(x, x, 0, 1)) + sup_g;
        double s2 = std::abs(K.eval(x, x, 0, 2)) + sup_g;
        CHECK(std::abs(K.jump(x, 0, 1)) < 1e-6 * s1);
        CHECK(std::abs(K.jump(x, 0, 2)) < 1e-6 * s2);
        CHECK(std::abs(-eps * K.jump(x, 0, 3) - 1.0) < 1e-6);
    }
    // operator residual away from x via mode-wise residuals is covered in the
    // modes suite; cross-check dzG against a centered difference of G.
    for (double x : {1.0}) {
        for (double z : {0.4, 2.1, 3.3}) {
            double h = 1e-5;
            Cplx fd = (K.eval(x, z + h) - K.eval(x, z - h)) / (2 * h);
            CHECK(std::abs(fd - K.eval(x, z, 0, 1)) <
                  1e-5 * (std::abs(fd) + 1e-3 * sup_g));
        }
    }
    CHECK_THROWS_AS(green_derivatives(K, 1.0, 2.0, 2, 2), ParameterError);
}

TEST_CASE("delta identity on a manufactured source") {
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), 1e3);
    ScalarField f = testutil::bump(3.0, 1.6);
    double fsup = testutil::sup_on(f.f, 0.0, p.z_max);
    double worst = 0.0;
    for (double z : {0.8, 1.9, 2.6, 3.4, 4.9, 6.5}) {
        Cplx r = greencheck::os_of_convolution(K, f.f, z) - f.f(z);
        worst = std::max(worst, std::abs(r));
    }
    CHECK(worst / fsup < 1e-4);
}

TEST_CASE("reciprocity: adjoint operator annihilates G in x away from x=z") {
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), 1e4);
    const SpectralPoint& pt = K.modes.pt;
    Cplx eps = pt.eps();
    double z = 2.0;
    auto b = [&](double x) { return p.u(x) - pt.c + 2.0 * eps * pt.alpha * pt.alpha; };
    auto a = [&](double x) {
        return pt.alpha * pt.alpha * (eps * pt.alpha * pt.alpha + p.u(x) - pt.c) + p.ddu(x);
    };
    double M = std::max(K.modes.rates.M_f, 1.0);
    double h = std::min(0.1 / M, 5e-3);
    for (double x : {0.8, 1.4, 3.1, 4.5}) {
        // L* psi = -eps d4 psi + d2(b psi) - a psi; x-derivatives from stacks,
        // fourth by a centered difference of the third.
        Cplx g = K.eval(x, z, 0, 0), g1 = K.eval(x, z, 1, 0), g2 = K.eval(x, z, 2, 0);
        Cplx g4 = (K.eval(x + h, z, 3, 0) - K.eval(x - h, z, 3, 0)) / (2 * h);
        Cplx d2b = p.ddu(x) * g + 2.0 * p.du(x) * g1 + b(x) * g2;
        Cplx resid = -eps * g4 + d2b - a(x) * g;
        double scale = std::abs(eps * g4) + std::abs(d2b) + std::abs(a(x) * g);
        CHECK(std::abs(resid) / scale < 1e-5);
    }
}

TEST_CASE("theorem bound fit with theta0 = 0.5") {
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), 1e4);
    std::vector<double> xs{0.3, 0.9, 1.8, 3.0, 5.0}, zs;
    for (double z = 0.15; z < 9.0; z += 0.35) zs.push_back(z);
    double c00 = greencheck::fit_c0(K, 0.5, 0, 0, xs, zs);
    double c01 = greencheck::fit_c0(K, 0.5, 0, 1, xs, zs);
    double c10 = greencheck::fit_c0(K, 0.5, 1, 0, xs, zs);
    CHECK(c00 < 100.0);
    CHECK(c01 < 100.0);
    CHECK(c10 < 100.0);
    MESSAGE("fitted C0 (0,0)/(0,1)/(1,0): ", c00, " ", c01, " ", c10);
}

TEST_CASE("vorticity split") {
    double alpha = 1.0;
    Cplx c(2.0, 0.0);

    // U'' == 0: residual part vanishes identically
    Profile z0 = make_zero_profile();
    GreenKernel K0 = halfline_green(z0, alpha, c, 1e4);
    FastScalarPair pair0 = airy_pair(z0, alpha, c, 1e4);
    VorticitySplit s0 = vorticity_split(K0, pair0, 1.0, 2.0);
    CHECK(std::abs(s0.r_g) < 1e-10 * std::abs(s0.g_a));

    // exponential profile: split identity away from the kink and the wall layer
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, alpha, c, 1e4);
    FastScalarPair pair = airy_pair(p, alpha, c, 1e4);
    double x = 1.5;
    double sup_dg = 0.0;
    for (double z = 0.2; z < 6.0; z += 0.2)
        sup_dg = std::max(sup_dg, std::abs(K.vorticity(x, z)));
    for (double z : {0.6, 1.0, 2.1, 3.0, 4.4}) {
        VorticitySplit s = vorticity_split(K, pair, x, z);
        Cplx dv = K.vorticity(x, z);
        CHECK(std::abs(dv - s.g_a - s.r_g) < 1e-5 * sup_dg);
    }

    // smallness: sup|R_G|/sup|Delta G| drops with R (Corollary 2.2)
    GreenKernel K5 = halfline_green(p, alpha, c, 1e5);
    FastScalarPair pair5 = airy_pair(p, alpha, c, 1e5);
    auto ratio = [&](const GreenKernel& KK, const FastScalarPair& pp) {
        double rg = 0.0, dg = 0.0;
        for (double z : {0.5, 1.0, 1.5, 2.0, 3.0}) {
            VorticitySplit s = vorticity_split(KK, pp, x, z);
            rg = std::max(rg, std::abs(s.r_g));
            dg = std::max(dg, std::abs(KK.vorticity(x, z)));
        }
        return rg / dg;
    };
    double r4 = ratio(K, pair), r5 = ratio(K5, pair5);
    CHECK(r5 < r4);
    MESSAGE("R_G/DeltaG ratio at R=1e4: ", r4, ", at R=1e5: ", r5);

    // weak-form consistency against a smooth compact test function
    ScalarField chi = testutil::bump(2.5, 1.4);
    Cplx eps = K.modes.pt.eps();
    auto integrand = [&](double zz) -> Cplx {
        Cplx ptchi = -eps * (chi.d2(zz) - alpha * alpha * chi.f(zz)) +
                     (p.u(zz) - c) * chi.f(zz);
        return K.vorticity(x, zz) * ptchi - p.ddu(zz) * K.eval(x, zz) * chi.f(zz);
    };
    Cplx weak = integrate_gk_split(integrand, 0.0, p.z_max, {x}, 1e-10, 1e-8);
    CHECK(std::abs(weak - chi.f(x)) < 1e-4 * std::abs(chi.f(x)));
}

TEST_SUITE_END();
