#include <doctest.h>

#include <cmath>

#include "oswald/semigroup.hpp"
#include "test_util.hpp"

using namespace oswald;

TEST_SUITE_BEGIN("semigroup");

namespace {
ScalarField test_omega() {
    return ScalarField{[](double z) { return Cplx((1.0 + z) * std::exp(-z), 0.0); },
                       [](double z) { return Cplx(-z * std::exp(-z), 0.0); },
                       [](double z) { return Cplx((z - 1.0) * std::exp(-z), 0.0); }};
}
}  // namespace

TEST_CASE("contour case selection and shape") {
    Profile p = make_exp_profile();
    // x = z: a = 0, five pieces (two degenerate-length shifts kept)
    Contour c1 = build_contour(p, 1.0, 1e-3, 1.0, 1.3, 1.3);
    CHECK(c1.small_a_case);
    int shifts = 0, verticals = 0;
    for (auto& pc : c1.pieces) {
        if (pc.kind == PieceKind::horizontal_shift) ++shifts;
        if (pc.kind == PieceKind::vertical) ++verticals;
    }
    CHECK(shifts == 2);
    CHECK(verticals == 1);
    // |x-z| = 1, nu = 1e-4, t = 1: a = 5000, a^2 nu >> theta0, three-piece case
    Contour c2 = build_contour(p, 1.0, 1e-4, 1.0, 0.5, 1.5);
    CHECK(c2.a == doctest::Approx(5000.0));
    CHECK_FALSE(c2.small_a_case);
    for (auto& pc : c2.pieces) CHECK(pc.kind != PieceKind::horizontal_shift);
    CHECK(c2.gamma == doctest::Approx(5000.0 * 5000.0 * 1e-4 + 0.5 * 1e-4));
    // endpoint continuity
    CHECK(c1.max_endpoint_gap() < 1e-12);
    CHECK(c2.max_endpoint_gap() < 1e-12);
    CHECK_THROWS_AS(build_contour(p, 1.0, 1e-3, -1.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("contour nodes avoid the exclusion strip") {
    Profile p = make_exp_profile();
    for (int trial = 0; trial < 200; ++trial) {
        double x = testutil::urand(0.0, 8.0);
        double z = testutil::urand(0.0, 8.0);
        double t = testutil::urand(0.05, 3.0);
        Contour ct = build_contour(p, 1.0, 1e-3, t, x, z);
        for (auto& [lam, w] : ct.all_nodes())
            CHECK_FALSE(in_exclusion_strip(p, 1.0, 1e-3, x, z, lam));
    }
}

TEST_CASE("zero profile: R part vanishes") {
    Profile p = make_zero_profile();
    SemigroupOptions opt;
    opt.lambda0_real = 0.0;
    auto [s, r] = split_semigroup(p, 1.0, 1e3, 0.5, test_omega(), 0.125, opt);
    CHECK(r.norm_eta < 1e-8 * s.norm_eta);
}

TEST_CASE("small-time identity") {
    Profile p = make_exp_profile();
    SemigroupOptions opt;
    opt.lambda0_real = 0.0;  // stable configuration
    ScalarField om = test_omega();
    EvolutionResult res = apply_semigroup(p, 1.0, 1e3, 1e-3, om, 0.125, opt);
    double worst = 0.0, sup = 0.0;
    for (size_t i = 0; i < res.grid->size(); ++i) {
        double z = (*res.grid)[i];
        double wgt = std::exp(0.125 * z);
        worst = std::max(worst, std::abs(res.omega[i] - om.f(z)) * wgt);
        sup = std::max(sup, std::abs(om.f(z)) * wgt);
    }
    CHECK(worst / sup < 1e-3);
}

TEST_CASE("S part solves the advection-diffusion equation") {
    Profile p = make_exp_profile();
    SemigroupOptions opt;
    opt.lambda0_real = 0.0;
    opt.with_r_part = false;
    SemigroupEvaluator ev(p, 1.0, 1e3, opt);
    ev.prepare(0.4);
    ScalarField om = test_omega();
    double t = 0.5, dt = 1e-3;
    EvolutionResult e0 = ev.evolve(t - dt, om, 0.125);
    EvolutionResult e1 = ev.evolve(t, om, 0.125);
    EvolutionResult e2 = ev.evolve(t + dt, om, 0.125);
    const auto& g = *e1.grid;
    double nu = 1e-3;
    double worst = 0.0, scale = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        double z = g[i];
        if (z < 0.3 || z > 6.0) continue;
        // locate neighbors for a z second difference
        if (i == 0 || i + 1 >= g.size()) continue;
        double hm = g[i] - g[i - 1], hp = g[i + 1] - g[i];
        Cplx d2 = 2.0 * (hm * e1.s_part[i + 1] + hp * e1.s_part[i - 1] -
                         (hm + hp) * e1.s_part[i]) /
                  (hm * hp * (hm + hp));
        Cplx dt_om = (e2.s_part[i] - e0.s_part[i]) / (2.0 * dt);
        Cplx resid = dt_om + I * 1.0 * p.u(z) * e1.s_part[i] -
                     nu * (d2 - 1.0 * e1.s_part[i]);
        worst = std::max(worst, std::abs(resid));
        scale = std::max(scale, std::abs(dt_om) + std::abs(p.u(z) * e1.s_part[i]));
    }
    CHECK(worst / scale < 1e-3);
}

TEST_CASE("weight gate") {
    Profile p = make_exp_profile();
    SemigroupOptions opt;
    opt.lambda0_real = 0.0;
    CHECK_THROWS_AS(apply_semigroup(p, 1.0, 1e3, 0.5, test_omega(), 0.3, opt),
                    WeightError);
}

TEST_SUITE_END();
