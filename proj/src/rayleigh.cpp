#include "oswald/rayleigh.hpp"

#include <cmath>

#include "oswald/quadrature.hpp"

namespace oswald {

namespace {

CMat sys_matrix(const Profile& p, double alpha, Cplx c, double z) {
    CMat A(2, 2);
    A(0, 0) = 0.0;
    A(0, 1) = 1.0;
    A(1, 0) = alpha * alpha + p.ddu(z) / (p.u(z) - c);
    A(1, 1) = 0.0;
    return A;
}

// exp((A_plus -/+ alpha I) s) in closed form; A_plus^2 = alpha^2 I.
CMat kernel_translation(double alpha, double sign_mu, double s) {
    double ch = std::cosh(alpha * s), sh = std::sinh(alpha * s);
    double e = std::exp(-sign_mu * alpha * s);
    CMat K(2, 2);
    K(0, 0) = e * ch;
    K(0, 1) = e * sh / alpha;
    K(1, 0) = e * sh * alpha;
    K(1, 1) = e * ch;
    return K;
}

double pick_tail_M(const Profile& p, double alpha, Cplx c, double sign_mu,
                   const WeightedNorm& norm) {
    auto pert = [&](double y) -> CMat {
        CMat B = CMat::Zero(2, 2);
        B(1, 0) = p.ddu(y) / (p.u(y) - c);
        if (sign_mu < 0) B = -B;  // minus case: V = V_- - integral
        return B;
    };
    auto K = [&](double s) { return kernel_translation(alpha, sign_mu, s); };
    double M = std::min(2.0, 0.5 * p.z_max);
    while (M < 0.5 * p.z_max) {
        double f = duhamel_contraction_estimate(K, pert, norm, M, p.z_max,
                                                /*anchor_at_end=*/sign_mu < 0);
        if (f <= 0.5) return M;
        M *= 2.0;
    }
    return std::min(M, 0.5 * p.z_max);
}

}  // namespace

Cplx RayleighBasis::phi_minus(double z, int k) const {
    return std::exp(-pt.alpha * z) * minus.eval(z)[k];
}

Cplx RayleighBasis::phi_plus(double z, int k) const {
    return std::exp(pt.alpha * z) * plus_norm.eval(z)[k];
}

Cplx RayleighBasis::wronskian(double z) const {
    // exponents cancel between the +/- modes
    CVec m = minus.eval(z), p = plus_norm.eval(z);
    return m[0] * p[1] - p[0] * m[1];
}

RayleighBasis rayleigh_modes(const Profile& p, double alpha, Cplx c, const Config& cfg) {
    if (!admissible(p, alpha, c, cfg.eps0))
        throw ParameterError("rayleigh_modes: (alpha, c) violates the admissibility gate");

    RayleighBasis B;
    B.pt = {alpha, c, 1.0};
    B.profile = p;
    B.eta = 0.5 * std::min(alpha, p.eta0);
    WeightedNorm norm{B.eta, 0, alpha};

    // ----- minus mode: Duhamel tail + backward extension -----
    B.tail_M = pick_tail_M(p, alpha, c, -1.0, norm);
    auto pert_minus = [&](double y) -> CMat {
        CMat Bm = CMat::Zero(2, 2);
        Bm(1, 0) = -p.ddu(y) / (p.u(y) - c);  // V = V_- - int K (A - A_+) V
        return Bm;
    };
    auto K_minus = [&](double s) { return kernel_translation(alpha, -1.0, s); };
    CVec v_minus(2);
    v_minus << 1.0, -alpha;
    TailFunction tail = duhamel_fixed_point(
        K_minus, pert_minus, [&](double) { return v_minus; }, norm, B.tail_M, p.z_max,
        /*anchor_at_end=*/true, &B.report_minus, 1e-11, cfg.max_picard);

    // The fixed point pins the far-field anchor; re-integrate the whole mode
    // backward from z_max at integrator accuracy (the tail sweep's panel rule
    // is only second order, the anchor value is all it has to supply).
    auto A = [&](double z) { return sys_matrix(p, alpha, c, z); };
    auto mu_minus = [&](double) { return Cplx(-alpha, 0.0); };
    IntegrateOptions iopts;
    iopts.rtol = cfg.ode_rtol;
    iopts.atol = cfg.ode_atol;
    RenormTrajectory tr =
        integrate_renormalized(A, mu_minus, Direction::backward, tail.values.back(),
                               {0.0, p.z_max}, iopts);
    for (size_t i = 0; i < tr.nodes.size(); ++i) {
        tr.expo[i] = -alpha * tr.nodes[i];
        tr.expo_deriv[i] = -alpha;
    }
    // Normalize the bounded factor to 1 at z_max.
    Cplx scale = 1.0 / tr.values.back()[0];
    for (size_t i = 0; i < tr.values.size(); ++i) {
        tr.values[i] *= scale;
        tr.derivs[i] *= scale;
    }
    B.minus = std::move(tr);
    B.evans = B.minus.eval(0.0)[0];

    double psi_norm = 0.0;
    for (size_t i = 0; i < B.minus.nodes.size(); ++i)
        psi_norm = std::max(psi_norm, std::abs(B.minus.values[i][0] - 1.0) *
                                          std::exp(B.eta * B.minus.nodes[i]));
    B.psi_minus_norm = psi_norm;

    // ----- raw plus mode on the tail (diagnostics) -----
    auto pert_plus = [&](double y) -> CMat {
        CMat Bp = CMat::Zero(2, 2);
        Bp(1, 0) = p.ddu(y) / (p.u(y) - c);
        return Bp;
    };
    auto K_plus = [&](double s) { return kernel_translation(alpha, +1.0, s); };
    CVec v_plus(2);
    v_plus << 1.0, alpha;
    B.plus_raw = duhamel_fixed_point(K_plus, pert_plus, [&](double) { return v_plus; },
                                     norm, B.tail_M, p.z_max, /*anchor_at_end=*/false,
                                     &B.report_plus, 1e-11, cfg.max_picard);
    double psi_p = 0.0;
    for (size_t i = 0; i < B.plus_raw.grid.size(); ++i)
        psi_p = std::max(psi_p, std::abs(B.plus_raw.values[i][0] - 1.0) *
                                    std::exp(B.eta * B.plus_raw.grid[i]));
    B.psi_plus_norm = psi_p;

    // ----- normalized plus mode: forward integration from (0, alpha) -----
    auto mu_plus = [&](double) { return Cplx(alpha, 0.0); };
    CVec init_plus(2);
    init_plus << 0.0, alpha;
    B.plus_norm = integrate_renormalized(A, mu_plus, Direction::forward, init_plus,
                                         {0.0, p.z_max}, iopts);
    for (size_t i = 0; i < B.plus_norm.nodes.size(); ++i) {
        B.plus_norm.expo[i] = alpha * B.plus_norm.nodes[i];
        B.plus_norm.expo_deriv[i] = alpha;
    }
    return B;
}

Cplx inviscid_evans(const Profile& p, double alpha, Cplx c, const Config& cfg) {
    return rayleigh_modes(p, alpha, c, cfg).evans;
}

namespace {

// Factor pieces of G: for z > x,
//   G = -e^(-alpha(z-x)) fm(z)[k] fp(x) / (alpha E (U(x)-c)),
// with fm/fp the bounded factors of the minus/plus stacks.
Cplx green_value(const RayleighBasis& b, double x, double z, int kz) {
    const double alpha = b.pt.alpha;
    const Cplx c = b.pt.c;
    Cplx denom = alpha * b.evans * (b.profile.u(x) - c);
    if (std::abs(b.evans) < 1e-12)
        throw AtEigenvalueError("rayleigh_green: E(alpha,c) vanishes");
    double lo = std::min(x, z), hi = std::max(x, z);
    CVec fm = b.minus.eval(hi);
    CVec fp = b.plus_norm.eval(lo);
    double expo = -alpha * (hi - lo);
    if (z >= x) {
        return -std::exp(expo) * fm[kz] * fp[0] / denom;
    }
    return -std::exp(expo) * fm[0] * fp[kz] / denom;
}

}  // namespace

Cplx rayleigh_green(const RayleighBasis& basis, double x, double z) {
    return green_value(basis, x, z, 0);
}

Cplx rayleigh_green_dz(const RayleighBasis& basis, double x, double z, int k) {
    if (k == 0) return green_value(basis, x, z, 0);
    if (k != 1) throw ParameterError("rayleigh_green_dz: k <= 1");
    return green_value(basis, x, z, 1);
}

SampledFunction rayleigh_solve(const RayleighBasis& basis, const ScalarField& f,
                               double f_eta,
                               std::shared_ptr<const std::vector<double>> out_grid,
                               double quad_tol) {
    const double alpha = basis.pt.alpha;
    const Cplx c = basis.pt.c;
    const Profile& p = basis.profile;
    if (f_eta >= alpha)
        throw WeightError("rayleigh_solve: weight eta must satisfy eta < alpha");

    SampledFunction out;
    out.grid = out_grid;
    const auto& g = *out_grid;
    out.f0.resize(g.size());
    out.f1.resize(g.size());
    out.f2.resize(g.size());
    out.f3.resize(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        double z = g[i];
        auto integrand0 = [&](double x) { return green_value(basis, x, z, 0) * f.f(x); };
        auto integrand1 = [&](double x) { return green_value(basis, x, z, 1) * f.f(x); };
        out.f0[i] = integrate_gk_split(integrand0, 0.0, p.z_max, {z}, quad_tol, 1e-10);
        out.f1[i] = integrate_gk_split(integrand1, 0.0, p.z_max, {z}, quad_tol, 1e-10);
        // ODE identities for the higher derivatives.
        Cplx U = p.u(z), dU = p.du(z), d2U = p.ddu(z), d3U = p.deriv(3, z);
        Cplx fv = f.f(z), dfv = f.d1(z);
        Cplx gq = (fv + d2U * out.f0[i]) / (U - c);
        out.f2[i] = alpha * alpha * out.f0[i] + gq;
        Cplx dgq = (dfv + d3U * out.f0[i] + d2U * out.f1[i]) / (U - c) - gq * dU / (U - c);
        out.f3[i] = alpha * alpha * out.f1[i] + dgq;
    }
    return out;
}

bool large_alpha_nonvanishing(const Profile& p, double alpha, Cplx c, double alpha_big) {
    if (alpha < alpha_big) return false;
    // Contraction factor of the scaled Rayleigh iteration:
    //   alpha^-1 int |U'' / (U - c)| dz, finite since d_c > 0.
    Cplx cc = c;
    auto integrand = [&](double z) -> Cplx {
        return std::abs(p.ddu(z) / (p.u(z) - cc));
    };
    double J = integrate_gk(integrand, 0.0, p.z_max, 1e-9, 1e-9).real();
    return J / alpha < 1.0 / 3.0;
}

}  // namespace oswald
