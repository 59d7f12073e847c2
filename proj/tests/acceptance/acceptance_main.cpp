// Acceptance suite: one pass/fail line per criterion, exit nonzero on failure.
// Run as `oswald_acceptance [n]` for a single criterion or with no argument
// for all ten. Desk scale: alpha <= 16, R <= 1e5, each criterion minutes.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "../green_checks.hpp"
#include "../test_util.hpp"
#include "oswald/green.hpp"
#include "oswald/oracle.hpp"
#include "oswald/semigroup.hpp"
#include "oswald/spectrum.hpp"

using namespace oswald;

namespace {

struct Checker {
    bool ok = true;
    void expect(bool cond, const char* what, double got = NAN, double bound = NAN) {
        if (!cond) {
            ok = false;
            if (std::isnan(got))
                std::printf("    FAILED: %s\n", what);
            else
                std::printf("    FAILED: %s (got %.6g, bound %.6g)\n", what, got, bound);
        }
    }
};

ScalarField generic_omega() {
    return ScalarField{[](double z) { return Cplx((1.0 + z) * std::exp(-z), 0.0); },
                       [](double z) { return Cplx(-z * std::exp(-z), 0.0); },
                       [](double z) { return Cplx((z - 1.0) * std::exp(-z), 0.0); }};
}

// ---------------------------------------------------------------- criterion 1
bool crit1() {
    Checker ck;
    Profile p = make_exp_profile();
    std::vector<std::pair<double, double>> zw{{2.0, 1.2}, {3.5, 1.8}, {5.0, 1.0},
                                              {1.2, 0.8}, {4.2, 2.2}};
    for (double alpha : {1.0, 2.0}) {
        for (double R : {1e3, 1e5}) {
            GreenKernel K = halfline_green(p, alpha, Cplx(2.0, 0.0), R);
            for (auto [z0, w] : zw) {
                ScalarField f = testutil::bump(z0, w);
                double fsup = testutil::sup_on(f.f, 0.0, p.z_max);
                double worst = 0.0;
                for (double z : {0.7, 1.5, 2.4, 3.2, 4.1, 5.3, 6.6}) {
                    Cplx r = greencheck::os_of_convolution(K, f.f, z) - f.f(z);
                    worst = std::max(worst, std::abs(r));
                }
                ck.expect(worst / fsup <= 1e-4, "OS(conv G f) = f at 1e-4",
                          worst / fsup, 1e-4);
            }
        }
    }
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 2
bool crit2() {
    Checker ck;
    Profile p = make_exp_profile();
    GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), 1e5);
    Cplx eps = K.modes.pt.eps();
    double sup_g = 0.0;
    for (double x : {0.5, 1.0, 2.0, 4.0})
        for (double z = 0.1; z < 9.0; z += 0.2)
            sup_g = std::max(sup_g, std::abs(K.eval(x, z)));
    for (int i = 0; i < 50; ++i) {
        double x = testutil::urand(0.05, 9.0);
        ck.expect(std::abs(-eps * K.jump(x, 0, 3) - 1.0) <= 1e-6,
                  "[-eps dz3 G] = 1", std::abs(-eps * K.jump(x, 0, 3) - 1.0), 1e-6);
        ck.expect(std::abs(K.eval(x, 0.0, 0, 0)) <= 1e-6 * sup_g, "G(x, 0) = 0");
        ck.expect(std::abs(K.eval(x, 0.0, 0, 1)) <= 1e-6 * sup_g, "dz G(x, 0) = 0");
        double s0 = std::max(std::abs(K.eval(x, x, 0, 0)), 1e-3 * sup_g);
        double s1 = std::max(std::abs(K.eval(x, x, 0, 1)), K.modes.pt.alpha * s0);
        double s2 = std::max(std::abs(K.eval(x, x, 0, 2)),
                             K.modes.rates.m_f * K.modes.pt.alpha * s0);
        ck.expect(std::abs(K.jump(x, 0, 0)) <= 1e-6 * s0, "G continuous");
        ck.expect(std::abs(K.jump(x, 0, 1)) <= 1e-6 * s1, "dz G continuous");
        ck.expect(std::abs(K.jump(x, 0, 2)) <= 1e-6 * s2, "dz2 G continuous");
    }
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 3
bool crit3() {
    Checker ck;
    Profile p = make_exp_profile();
    std::vector<double> xs{0.3, 0.9, 1.8, 3.0, 5.0}, zs;
    for (double z = 0.15; z < 9.0; z += 0.35) zs.push_back(z);
    for (double R : {1e3, 1e4}) {
        GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), R);
        for (int k = 0; k <= 1; ++k)
            for (int l = 0; l + k <= 2; ++l) {
                double c0 = greencheck::fit_c0(K, 0.5, k, l, xs, zs);
                ck.expect(std::isfinite(c0) && c0 < 100.0,
                          "theta0 = 0.5 bound fit (k+l <= 2)", c0, 100.0);
            }
    }
    // Corollary 2.2 smallness of R_G across R = 1e3 -> 1e4 -> 1e5
    double prev = 1e300;
    std::vector<double> ratios;
    for (double R : {1e3, 1e4, 1e5}) {
        GreenKernel K = halfline_green(p, 1.0, Cplx(2.0, 0.0), R);
        FastScalarPair pair = airy_pair(p, 1.0, Cplx(2.0, 0.0), R);
        double rg = 0.0, dg = 0.0;
        for (double z : {0.5, 1.0, 1.5, 2.2, 3.0}) {
            VorticitySplit s = vorticity_split(K, pair, 1.5, z);
            rg = std::max(rg, std::abs(s.r_g));
            dg = std::max(dg, std::abs(K.vorticity(1.5, z)));
        }
        double ratio = rg / dg;
        ratios.push_back(ratio);
        ck.expect(ratio < prev, "R_G/DeltaG monotone in R", ratio, prev);
        prev = ratio;
    }
    ck.expect(ratios.front() / ratios.back() >= 50.0,
              "R_G/DeltaG drops >= 50x from 1e3 to 1e5",
              ratios.front() / ratios.back(), 50.0);
    std::printf("    R_G/DeltaG ratios: %.3e %.3e %.3e\n", ratios[0], ratios[1],
                ratios[2]);
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 4
bool crit4() {
    Checker ck;
    Profile p = make_unstable_tanh_profile();
    double alpha = 1.0, R = 1e4;
    ComplexBox box{0.35, 0.70, 0.05, 0.30};
    FindResult fr = find_eigenvalues(p, alpha, R, box);
    std::printf("    Evans roots found: %zu (total winding %d)\n", fr.records.size(),
                fr.total_winding);
    ck.expect(static_cast<int>(fr.records.size()) == fr.total_winding,
              "winding equals root count", fr.records.size(), fr.total_winding);
    ck.expect(!fr.records.empty(), "unstable box contains a root");

    auto eigs = collocation_eigs(p, alpha, R, 224, box.center());
    std::vector<Cplx> in_box;
    for (Cplx c : eigs)
        if (c.real() > box.re0 && c.real() < box.re1 && c.imag() > box.im0 &&
            c.imag() < box.im1)
            in_box.push_back(c);
    for (const auto& rec : fr.records) {
        double best = 1e300;
        for (Cplx c : in_box) best = std::min(best, std::abs(c - rec.c));
        ck.expect(best <= 1e-3, "Evans root matches a resolved collocation eig", best,
                  1e-3);
    }
    for (Cplx c : in_box) {
        double best = 1e300;
        for (const auto& rec : fr.records) best = std::min(best, std::abs(c - rec.c));
        ck.expect(best <= 1e-3, "collocation eig matches an Evans root", best, 1e-3);
    }
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 5
bool crit5() {
    Checker ck;
    Profile p = make_unstable_tanh_profile();
    double alpha0 = 1.0;
    Cplx c0 = inviscid_root(p, alpha0, Cplx(0.49, 0.13));
    std::vector<double> nus;
    for (int i = 0; i <= 8; ++i) nus.push_back(1e-3 * std::pow(1e-2, i / 8.0));
    auto path = continue_from_inviscid(p, alpha0, c0, nus);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [nu, c] : path) {
        ck.expect(c.imag() > 0.0, "Im c_nu > 0");
        double lx = std::log(nu), ly = std::log(std::abs(c - c0));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(path.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::printf("    |c_nu - c0| ~ nu^%.3f over nu in [1e-5, 1e-3]\n", slope);
    ck.expect(std::abs(slope - 0.5) <= 0.15, "log-log slope 0.5 +- 0.15", slope, 0.5);
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 6
bool crit6() {
    Checker ck;
    Profile p = make_exp_profile();
    Cplx c(2.0, 0.0);
    for (double alpha : {1.0, 2.0, 4.0}) {
        RayleighBasis rb = rayleigh_modes(p, alpha, c);
        for (double R : {1e4, 1e5, 1e6}) {
            FastScalarPair pair = airy_pair(p, alpha, c, R);
            SlowModesResult sm = slow_modes(p, alpha, c, R, rb, pair);
            double bound = 10.0 * alpha / (pair.rates.m_f * pair.rates.m_f) *
                           (1.0 + 1.0 / std::abs(rb.evans));
            if (!sm.report_minus.ratios.empty())
                ck.expect(sm.report_minus.ratios[0] <= bound,
                          "slow iteration ratio within Lemma 3.7 envelope",
                          sm.report_minus.ratios[0], bound);
            FastModesResult fm = fast_modes(p, alpha, c, R);
            double dev_bound = 10.0 * fm.report.sqrt_eps_abs;
            ck.expect(fm.report.factor_dev_minus <= dev_bound,
                      "fast factor deviation <= 10 sqrt|eps| (minus)",
                      fm.report.factor_dev_minus, dev_bound);
            ck.expect(fm.report.factor_dev_plus <= dev_bound,
                      "fast factor deviation <= 10 sqrt|eps| (plus)",
                      fm.report.factor_dev_plus, dev_bound);
        }
    }
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 7
bool crit7() {
    Checker ck;
    Profile p = make_exp_profile();
    double alpha = 1.0, R = 1e3;
    ScalarField om = testutil::bump(2.5, 1.6);
    SemigroupOptions opt;
    opt.lambda0_real = 0.0;  // stable configuration (verified in criterion 10 runs)
    SemigroupEvaluator ev(p, alpha, R, opt);
    ev.prepare(1e-3);

    // t ~ 0 identity
    {
        EvolutionResult r = ev.evolve(1e-3, om, 0.125);
        double worst = 0, sup = 0;
        for (size_t i = 0; i < r.grid->size(); ++i) {
            double z = (*r.grid)[i];
            double w = std::exp(0.125 * z);
            worst = std::max(worst, std::abs(r.omega[i] - om.f(z)) * w);
            sup = std::max(sup, std::abs(om.f(z)) * w);
        }
        ck.expect(worst / sup <= 1e-3, "t -> 0 identity", worst / sup, 1e-3);
    }

    // agreement with the method-of-lines oracle
    for (double t : {0.5, 1.0, 2.0}) {
        EvolutionResult r = ev.evolve(t, om, 0.125);
        CubicSpline<Cplx> spl(*r.grid, r.omega);
        TimestepResult ts = timestep_evolve(p, alpha, R, om, t, 300, 1e-3);
        double worst = 0, sup = 0;
        for (size_t i = 0; i < ts.nodes.size(); ++i) {
            double z = ts.nodes[i];
            if (z > 14.0) continue;
            worst = std::max(worst, std::abs(ts.omega[i] - spl.eval(z)));
            sup = std::max(sup, std::abs(ts.omega[i]));
        }
        ck.expect(worst / sup <= 1e-3, "contour vs timestepper", worst / sup, 1e-3);
        std::printf("    t = %.1f: |contour - timestepper| = %.2e (rel)\n", t,
                    worst / sup);
    }

    // contour-shift independence
    {
        SemigroupOptions opt2 = opt;
        opt2.gamma_shift = 0.1;
        SemigroupEvaluator ev2(p, alpha, R, opt2);
        ev2.prepare(1.0);
        EvolutionResult a = ev.evolve(1.0, om, 0.125);
        EvolutionResult b = ev2.evolve(1.0, om, 0.125);
        double worst = 0, sup = 0;
        for (size_t i = 0; i < a.grid->size(); ++i) {
            // grids may differ; compare on a's grid via spline of b
            sup = std::max(sup, std::abs(a.omega[i]));
        }
        CubicSpline<Cplx> sb(*b.grid, b.omega);
        for (size_t i = 0; i < a.grid->size(); ++i)
            worst = std::max(worst, std::abs(a.omega[i] - sb.eval((*a.grid)[i])));
        ck.expect(worst / sup <= 1e-5, "contour-shift independence", worst / sup, 1e-5);
    }

    // approximate semigroup property
    {
        EvolutionResult r1 = ev.evolve(0.5, om, 0.125);
        CubicSpline<Cplx> s1(*r1.grid, r1.omega);
        CubicSpline<Cplx> d1(*r1.grid, [&] {
            std::vector<Cplx> d(r1.grid->size());
            for (size_t i = 0; i < d.size(); ++i) {
                double z = (*r1.grid)[i];
                double h = 1e-4;
                d[i] = (s1.eval(std::min(z + h, p.z_max)) - s1.eval(std::max(z - h, 0.0))) /
                       (std::min(z + h, p.z_max) - std::max(z - h, 0.0));
            }
            return d;
        }());
        ScalarField om_mid{[&](double z) { return s1.eval(z); },
                           [&](double z) { return d1.eval(z); }, nullptr};
        EvolutionResult r2 = ev.evolve(0.5, om_mid, 0.125);
        EvolutionResult rfull = ev.evolve(1.0, om, 0.125);
        CubicSpline<Cplx> s2(*r2.grid, r2.omega);
        double worst = 0, sup = 0;
        for (size_t i = 0; i < rfull.grid->size(); ++i) {
            double z = (*rfull.grid)[i];
            worst = std::max(worst, std::abs(rfull.omega[i] - s2.eval(z)));
            sup = std::max(sup, std::abs(rfull.omega[i]));
        }
        ck.expect(worst / sup <= 1e-3, "approximate semigroup property", worst / sup,
                  1e-3);
    }
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 8
bool crit8() {
    Checker ck;
    // Unstable configuration
    Profile pu = make_unstable_tanh_profile();
    double alpha = 1.0, R = 1e4;
    ComplexBox box{0.40, 0.58, 0.08, 0.20};
    FindResult fr = find_eigenvalues(pu, alpha, R, box);
    if (fr.records.empty()) {
        std::printf("    FAILED: no unstable eigenvalue found\n");
        return false;
    }
    const EigenRecord& rec = fr.records[0];
    double lam = rec.lambda.real();
    std::printf("    lambda_alpha = %.6f %+.6fi\n", rec.lambda.real(), rec.lambda.imag());

    SemigroupOptions opt;
    opt.lambda0_real = lam;
    SemigroupEvaluator ev(pu, alpha, R, opt);
    ev.prepare(4.0);

    // eigenmode-seeded evolution: omega_e = Delta_alpha phi = phi'' - a^2 phi
    std::vector<Cplx> vort(rec.mode.grid->size());
    for (size_t i = 0; i < vort.size(); ++i)
        vort[i] = rec.mode.f2[i] - alpha * alpha * rec.mode.f0[i];
    CubicSpline<Cplx> vr(*rec.mode.grid, vort);
    ScalarField om_eig{[&](double z) { return vr.eval(z); },
                       [&](double z) { return vr.deriv(z); }, nullptr};
    std::vector<double> ts{5.0, 8.0, 11.0, 14.0, 17.0, 20.0};
    auto fit_rate = [&](const ScalarField& om) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double t : ts) {
            EvolutionResult r = ev.evolve(t, om, 0.125);
            double ly = std::log(std::max(r.norm_eta, 1e-300));
            sx += t;
            sy += ly;
            sxx += t * t;
            sxy += t * ly;
        }
        double n = static_cast<double>(ts.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    double rate_eig = fit_rate(om_eig);
    std::printf("    eigenmode-seeded rate %.5f vs Re lambda %.5f\n", rate_eig, lam);
    ck.expect(std::abs(rate_eig - lam) <= 0.02, "eigenmode rate = Re lambda +- 0.02",
              rate_eig, lam);
    double rate_gen = fit_rate(generic_omega());
    std::printf("    generic rate %.5f\n", rate_gen);
    ck.expect(rate_gen <= lam + 0.05, "generic rate <= Re lambda + 0.05", rate_gen,
              lam + 0.05);

    // Stable configuration: S-part decay at least e^{-alpha^2 nu t / 2}
    Profile ps = make_exp_profile();
    SemigroupOptions opts;
    opts.lambda0_real = 0.0;
    SemigroupEvaluator evs(ps, 2.0, 1e3, opts);
    evs.prepare(2.0);
    ScalarField om = generic_omega();
    double cfit = 0.0;
    double norm0 = 0.0;
    {
        EvolutionResult r0 = evs.evolve(1e-3, om, 0.125);
        norm0 = r0.norm_eta_s;
    }
    for (double t : {2.0, 8.0, 14.0, 20.0}) {
        EvolutionResult r = evs.evolve(t, om, 0.125);
        cfit = std::max(cfit, r.norm_eta_s * std::exp(0.5 * 4.0 * 1e-3 * t) / norm0);
    }
    std::printf("    fitted C_tau for the S-part decay: %.3f\n", cfit);
    ck.expect(cfit < 10.0, "S-part decays like e^{-a^2 nu t/2} with finite C", cfit,
              10.0);

    // R-part amplitude scaling across alpha in {2,4,8,16}. The spectral
    // margin tau is fixed at 2 across the scan: on the vertical piece the
    // contour sits at Im c = tau/alpha, and at alpha = 16 a small tau would
    // push d_c below the slow/fast separation the mode construction needs
    // (the Theorem's bound holds for every fixed tau with its own C_tau).
    std::vector<double> amps;
    const double tau_scan = 2.0;
    for (double a : {2.0, 4.0, 8.0, 16.0}) {
        SemigroupOptions o;
        o.lambda0_real = 0.0;
        o.tau = tau_scan;
        SemigroupEvaluator e2(ps, a, 2e4, o);
        e2.prepare(1.0);
        double amp = 0.0;
        for (double t : {1.0, 3.0}) {
            EvolutionResult r = e2.evolve(t, om, 0.125);
            amp = std::max(amp, r.norm_eta_r * std::exp(-tau_scan * t));
        }
        amps.push_back(amp / (std::log(a) / (a * a)));
        std::printf("    alpha = %2.0f: R-part amplitude/alpha^-2 log alpha = %.4e\n",
                    a, amps.back());
    }
    double lo = *std::min_element(amps.begin(), amps.end());
    double hi = *std::max_element(amps.begin(), amps.end());
    ck.expect(hi / lo <= 3.0, "R-part amplitudes ~ alpha^-2 log alpha within 3x",
              hi / lo, 3.0);
    return ck.ok;
}

// ---------------------------------------------------------------- criterion 9
bool crit9() {
    Checker ck;
    Profile p = make_exp_profile();
    Cplx c(2.0, 0.0);
    std::vector<double> cray, cairy;
    for (double alpha : {0.8, 2.5, 8.0}) {
        RayleighBasis rb = rayleigh_modes(p, alpha, c);
        FastScalarPair pair = airy_pair(p, alpha, c, 1e4);
        auto grid = layer_grid(p.z_max, pair.rates.M_f, 0.03);
        const auto& zg = *grid;

        // manufactured residual for Ray
        ScalarField g = testutil::sin_window(2.0, 14.0);
        auto rayg = [&](double z) -> Cplx {
            Cplx lap = g.d2(z) - alpha * alpha * g.f(z);
            return (p.u(z) - c) * lap - p.ddu(z) * g.f(z);
        };
        ScalarField f{rayg, nullptr, nullptr};
        SampledFunction phi = rayleigh_solve(rb, f, 0.4, grid);
        double worstr = 0.0;
        double fsup = testutil::sup_on(f.f, 0.0, p.z_max);
        for (size_t i = 4; i + 4 < zg.size(); i += 3) {
            double z = zg[i];
            Cplx d2 = testutil::node_deriv(zg, phi.f1, i, 7);
            Cplx lap = d2 - alpha * alpha * phi.f0[i];
            Cplx resid = (p.u(z) - c) * lap - p.ddu(z) * phi.f0[i] - rayg(z);
            worstr = std::max(worstr, std::abs(resid));
        }
        ck.expect(worstr / fsup <= 1e-6, "Ray(Ray^-1 f) = f at 1e-6", worstr / fsup,
                  1e-6);

        // manufactured residual for Airy
        Cplx eps = pair.pt.eps();
        auto gfun = [](double z) { return z * z * std::exp(-z); };
        auto g2f = [](double z) { return (z * z - 4 * z + 2) * std::exp(-z); };
        auto g4f = [](double z) { return (z * z - 8 * z + 12) * std::exp(-z); };
        auto airyg = [&](double z) -> Cplx {
            Cplx lap = g2f(z) - alpha * alpha * gfun(z);
            Cplx lap2 = g4f(z) - 2 * alpha * alpha * g2f(z) +
                        std::pow(alpha, 4) * gfun(z);
            return (p.u(z) - c) * lap - eps * lap2;
        };
        ScalarField fa{airyg, nullptr, nullptr};
        AirySolution sol = airy_solve(pair, fa, 0.4, 0, grid);
        // integral-form identity chain (exact inside the wall layer) plus the
        // pointwise residual where stencils resolve
        {
            const size_t nn = zg.size();
            std::vector<Cplx> lap(nn), lapd(nn), w2(nn), w2d(nn);
            for (size_t i = 0; i < nn; ++i) {
                double z = zg[i];
                Cplx mu2 = pair.mu_f(z) * pair.mu_f(z);
                lap[i] = alpha * alpha * sol.v.f0[i] + sol.w.f0[i];
                lapd[i] = alpha * alpha * sol.v.f1[i] + sol.w.f1[i];
                w2[i] = mu2 * sol.w.f0[i] - fa.f(z) / eps;
                w2d[i] = (p.du(z) / eps) * sol.w.f0[i] + mu2 * sol.w.f1[i] -
                         fa.d1(z) / eps;
            }
            double c1 = testutil::integral_consistency(zg, sol.v.f0, sol.v.f1, lap);
            double c2 = testutil::integral_consistency(zg, sol.v.f1, lap, lapd);
            double c3 = testutil::integral_consistency(zg, sol.w.f0, sol.w.f1, w2);
            double c4 = testutil::integral_consistency(zg, sol.w.f1, w2, w2d);
            ck.expect(std::max({c1, c2, c3, c4}) <= 1e-6,
                      "Airy identity chain (integral form) at 1e-6",
                      std::max({c1, c2, c3, c4}), 1e-6);
        }
        double worsta = 0.0;
        double fasup = testutil::sup_on(fa.f, 0.0, p.z_max);
        for (size_t i = 4; i + 4 < zg.size(); i += 5) {
            double z = zg[i];
            if (z < 10.0 / pair.rates.m_f) continue;
            Cplx v4 = testutil::node_deriv(zg, sol.v.f3, i);
            Cplx lap = sol.v.f2[i] - alpha * alpha * sol.v.f0[i];
            Cplx lap2 = v4 - 2 * alpha * alpha * sol.v.f2[i] +
                        std::pow(alpha, 4) * sol.v.f0[i];
            Cplx resid = (p.u(z) - c) * lap - eps * lap2 - airyg(z);
            worsta = std::max(worsta, std::abs(resid));
        }
        ck.expect(worsta / fasup <= 1e-6, "Airy(Airy^-1 f) = f at 1e-6",
                  worsta / fasup, 1e-6);

        // fitted constants at a fixed eta across the alpha decade
        double eta = 0.4;
        ScalarField fd{[&](double z) { return Cplx(std::exp(-eta * z)); }, nullptr,
                       nullptr};
        SampledFunction sr = rayleigh_solve(rb, fd, eta, grid);
        double nr = 0.0;
        for (size_t i = 0; i < zg.size(); ++i)
            nr = std::max(nr, std::abs(sr.f0[i]) * std::exp(eta * zg[i]));
        double dc = range_distance(p, c);
        cray.push_back(nr * alpha * alpha * dc * std::abs(rb.evans));

        AirySolution sa = airy_solve(pair, fd, eta, 0, grid);
        double na = 0.0;
        for (size_t i = 0; i < zg.size(); ++i)
            na = std::max(na, std::abs(sa.v.f0[i]) * std::exp(eta * zg[i]));
        cairy.push_back(na * std::abs(eps) * pair.rates.m_f * pair.rates.m_f *
                        alpha * alpha);
    }
    auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) /
               *std::min_element(v.begin(), v.end());
    };
    std::printf("    est-Ray1 fitted C: %.3f %.3f %.3f (spread %.2f)\n", cray[0],
                cray[1], cray[2], spread(cray));
    std::printf("    Prop 3.6 fitted C: %.3f %.3f %.3f (spread %.2f)\n", cairy[0],
                cairy[1], cairy[2], spread(cairy));
    ck.expect(spread(cray) <= 2.0, "est-Ray1 constant stable within 2x", spread(cray),
              2.0);
    ck.expect(spread(cairy) <= 2.0, "Prop 3.6 constant stable within 2x",
              spread(cairy), 2.0);
    return ck.ok;
}

// --------------------------------------------------------------- criterion 10
bool crit10() {
    Checker ck;
    Profile p = make_unstable_tanh_profile();
    for (auto [alpha, R] : std::vector<std::pair<double, double>>{{1.0, 1e4},
                                                                  {0.6, 1e3}}) {
        SpectralStrip strip = spectral_strip(p, alpha, 1.0 / R);
        ComplexBox box{0.30, 0.75, 0.04, 0.30};
        FindResult fr = find_eigenvalues(p, alpha, R, box);
        for (const auto& rec : fr.records)
            ck.expect(strip.contains(rec.lambda), "Evans eigenvalue inside the strip");
        auto eigs = collocation_eigs(p, alpha, R, 192, box.center());
        for (Cplx c : eigs) {
            Cplx lam = -I * alpha * c;
            ck.expect(strip.contains(lam, 1e-6 + 1e-3 * std::abs(lam)),
                      "collocation eigenvalue inside the strip", lam.real(),
                      strip.re_max);
        }
    }
    return ck.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::function<bool()>> crits{crit1, crit2, crit3, crit4, crit5,
                                             crit6, crit7, crit8, crit9, crit10};
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    bool all_ok = true;
    for (int i = 1; i <= 10; ++i) {
        if (only != 0 && i != only) continue;
        std::printf("criterion %d ...\n", i);
        std::fflush(stdout);
        bool ok = false;
        try {
            ok = crits[i - 1]();
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
        }
        std::printf("criterion %d: %s\n", i, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
