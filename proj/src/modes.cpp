#include "oswald/modes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "oswald/quadrature.hpp"
#include "oswald/separable.hpp"

namespace oswald {

namespace {

// 4-point Gauss-Legendre on [0,1].
const double G4X[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                       0.930568155797026};
const double G4W[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                       0.173927422568727};
// 5-point Gauss-Legendre on [0,1] (exponent accumulation).
const double G5X[5] = {0.046910077030668, 0.230765344947158, 0.5,
                       0.769234655052841, 0.953089922969332};
const double G5W[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                       0.239314335249683, 0.118463442528095};

Cplx safe_exp(Cplx w) {
    if (w.real() < -745.0) return 0.0;
    return std::exp(w);
}

struct ProfileCache {
    // U derivatives 0..6 at z (closed forms for built-ins).
    const Profile* p;
    double d(int k, double z) const { return p->deriv(k, z); }
};

}  // namespace

double ErrorTriplet::norm_eta2(double eta, double alpha) const {
    double a = std::max(alpha, 1e-30);
    return weighted_sup(*grid, v, eta) + weighted_sup(*grid, d1, eta) / a +
           weighted_sup(*grid, d2, eta) / (a * a);
}

// ---------------------------------------------------------------------------
// Slow-mode corrector machinery
// ---------------------------------------------------------------------------

namespace {

struct CorrectorStacks {
    // Psi_n = -(u stacks), Phi_n stacks, next error triplet.
    std::vector<CVec4> psi_corr;  // Psi_n derivative stack (0..3)
    std::vector<CVec4> phi_corr;  // Phi_n derivative stack (0..3)
    ErrorTriplet e_next;
};

// One corrector application. E is the current conjugated OS residual.
CorrectorStacks corrector_step(const ErrorTriplet& e, const SlowContext& ctx) {
    const auto& grid = *ctx.grid;
    const int n = static_cast<int>(grid.size());
    const double alpha = ctx.pt.alpha;
    const Cplx c = ctx.pt.c;
    const Cplx eps = ctx.pt.eps();
    const int sgn = ctx.sgn;
    const Profile& p = ctx.profile;
    const RayleighBasis& rb = *ctx.rayleigh;
    const FastScalarPair& pair = *ctx.pair;

    auto ev = std::make_shared<std::vector<Cplx>>(e.v);
    auto ed = std::make_shared<std::vector<Cplx>>(e.d1);
    auto Efun = hermite_fn(ctx.grid, ev, ed);

    // --- conjugated Rayleigh solve: u = e^{-sgn a z} Ray^-1(e^{sgn a x} E) ---
    auto Wt_ray = [&, Efun](double x) { return Efun(x) / (p.u(x) - c); };
    SepSolveResult ray = separable_solve(grid, rb.minus, 1.0, rb.plus_norm, 1.0,
                                         Wt_ray, sgn * alpha,
                                         -1.0 / (alpha * rb.evans));

    // Homogeneous correction so Psi_n decays (minus branch only).
    std::vector<Cplx> u0(n), u1(n);
    if (sgn < 0) {
        Cplx h_end = rb.minus.values.back()[0];  // == 1 by normalization
        Cplx C = ray.u.back() / h_end;
        for (int i = 0; i < n; ++i) {
            CVec h = rb.minus.eval(grid[i]);
            Cplx hd = rb.minus.eval_deriv(grid[i])[0];
            u0[i] = ray.u[i] - C * h[0];
            u1[i] = ray.du[i] - C * hd;
        }
    } else {
        u0 = ray.u;
        u1 = ray.du;
    }

    // ODE identities for the higher derivatives of u (Ray_{a,sgn}(u) = E):
    //   u'' = -2 sgn a u' + g,   g = (E + U'' u)/(U - c).
    std::vector<CVec4> psi_corr(n);
    std::vector<Cplx> g0(n), g1(n), g2(n);
    std::vector<Cplx> u2(n), u3(n);
    for (int i = 0; i < n; ++i) {
        double z = grid[i];
        Cplx U = p.u(z), U1 = p.du(z), U2 = p.ddu(z), U3 = p.deriv(3, z),
             U4 = p.deriv(4, z);
        Cplx D = U - c;
        Cplx nn = e.v[i] + U2 * u0[i];
        g0[i] = nn / D;
        u2[i] = -2.0 * sgn * alpha * u1[i] + g0[i];
        Cplx n1 = e.d1[i] + U3 * u0[i] + U2 * u1[i];
        g1[i] = (n1 - g0[i] * U1) / D;
        u3[i] = -2.0 * sgn * alpha * u2[i] + g1[i];
        Cplx n2 = e.d2[i] + U4 * u0[i] + 2.0 * U3 * u1[i] + U2 * u2[i];
        g2[i] = (n2 - 2.0 * g1[i] * U1 - g0[i] * U2) / D;
        psi_corr[i] = CVec4(-u0[i], -u1[i], -u2[i], -u3[i]);
    }

    // F = eps Delta_{a,sgn}^2 u = eps (g'' + 2 sgn a g').
    auto Fv = std::make_shared<std::vector<Cplx>>(n);
    for (int i = 0; i < n; ++i)
        (*Fv)[i] = eps * (g2[i] + 2.0 * sgn * alpha * g1[i]);
    CubicSpline<Cplx> Fspl(grid, *Fv);
    auto Ffun = [&Fspl](double x) { return Fspl.eval(x); };

    // --- conjugated Airy solve: Phi = -eps e^{-sgn a z} Airy^-1(e^{sgn a x} F) ---
    Cplx Kp = 1.0 / (eps * pair.wronskian);
    SepSolveResult wsol = separable_solve(grid, pair.psi_minus, pair.sigma,
                                          pair.psi_plus, pair.sigma, Ffun,
                                          sgn * alpha, Kp);
    auto w0 = std::make_shared<std::vector<Cplx>>(wsol.u);
    auto w1 = std::make_shared<std::vector<Cplx>>(wsol.du);
    auto wfun = hermite_fn(ctx.grid, w0, w1);

    RenormTrajectory km = affine_trajectory(-alpha, p.z_max);
    RenormTrajectory kp = affine_trajectory(alpha, p.z_max);
    SepSolveResult vsol = separable_solve(grid, km, 1.0, kp, 1.0, wfun, sgn * alpha,
                                          Cplx(-1.0 / (2.0 * alpha)));

    CorrectorStacks out;
    out.psi_corr = std::move(psi_corr);
    out.phi_corr.resize(n);
    out.e_next.grid = ctx.grid;
    out.e_next.v.resize(n);
    out.e_next.d1.resize(n);
    out.e_next.d2.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = grid[i];
        Cplx U2 = p.ddu(z), U3 = p.deriv(3, z), U4 = p.deriv(4, z);
        Cplx v0 = vsol.u[i], v1 = vsol.du[i];
        Cplx v2 = (*w0)[i] - 2.0 * sgn * alpha * v1;
        Cplx v3 = (*w1)[i] - 2.0 * sgn * alpha * v2;
        CVec4 phi(-eps * v0, -eps * v1, -eps * v2, -eps * v3);
        out.phi_corr[i] = phi;
        out.e_next.v[i] = -U2 * phi[0];
        out.e_next.d1[i] = -(U3 * phi[0] + U2 * phi[1]);
        out.e_next.d2[i] = -(U4 * phi[0] + 2.0 * U3 * phi[1] + U2 * phi[2]);
    }
    return out;
}

// Initial residual E_0 = -eps Delta_{a,sgn}^2 psi_0 for a Rayleigh factor
// stack h (q = U'' h / (U - c); E_0 = -eps (q'' + 2 sgn a q'), etc).
ErrorTriplet initial_error(const std::vector<CVec4>& h, const SlowContext& ctx) {
    const auto& grid = *ctx.grid;
    const int n = static_cast<int>(grid.size());
    const double alpha = ctx.pt.alpha;
    const Cplx c = ctx.pt.c;
    const Cplx eps = ctx.pt.eps();
    const int sgn = ctx.sgn;
    const Profile& p = ctx.profile;

    ErrorTriplet e;
    e.grid = ctx.grid;
    e.v.resize(n);
    e.d1.resize(n);
    e.d2.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = grid[i];
        Cplx U = p.u(z), U1 = p.du(z), U2 = p.ddu(z), U3 = p.deriv(3, z),
             U4 = p.deriv(4, z), U5 = p.deriv(5, z), U6 = p.deriv(6, z);
        Cplx D = U - c;
        Cplx h0 = h[i][0], h1 = h[i][1], h2 = h[i][2], h3 = h[i][3];
        // q-derivative ladder with h'''' from the conjugated Rayleigh ODE.
        Cplx q0 = U2 * h0 / D;
        Cplx n1 = U3 * h0 + U2 * h1;
        Cplx q1 = (n1 - q0 * U1) / D;
        Cplx n2 = U4 * h0 + 2.0 * U3 * h1 + U2 * h2;
        Cplx q2 = (n2 - 2.0 * q1 * U1 - q0 * U2) / D;
        Cplx h4 = -2.0 * sgn * alpha * h3 + q2;
        Cplx n3 = U5 * h0 + 3.0 * U4 * h1 + 3.0 * U3 * h2 + U2 * h3;
        Cplx q3 = (n3 - 3.0 * q2 * U1 - 3.0 * q1 * U2 - q0 * U3) / D;
        Cplx n4 = U6 * h0 + 4.0 * U5 * h1 + 6.0 * U4 * h2 + 4.0 * U3 * h3 + U2 * h4;
        Cplx q4 = (n4 - 4.0 * q3 * U1 - 6.0 * q2 * U2 - 4.0 * q1 * U3 - q0 * U4) / D;
        e.v[i] = -eps * (q2 + 2.0 * sgn * alpha * q1);
        e.d1[i] = -eps * (q3 + 2.0 * sgn * alpha * q2);
        e.d2[i] = -eps * (q4 + 2.0 * sgn * alpha * q3);
    }
    return e;
}

// Rayleigh factor stack (h, h', h'', h''') from a 2-stack trajectory using the
// conjugated Rayleigh ODE for the top components.
std::vector<CVec4> rayleigh_factor_stack(const RenormTrajectory& tr,
                                         const SlowContext& ctx) {
    const auto& grid = *ctx.grid;
    const int n = static_cast<int>(grid.size());
    const double alpha = ctx.pt.alpha;
    const Cplx c = ctx.pt.c;
    const int sgn = ctx.sgn;
    const Profile& p = ctx.profile;
    std::vector<CVec4> h(n);
    for (int i = 0; i < n; ++i) {
        double z = grid[i];
        Cplx h0 = tr.eval(z)[0];
        Cplx h1 = tr.eval_deriv(z)[0];
        Cplx U = p.u(z), U1 = p.du(z), U2 = p.ddu(z), U3 = p.deriv(3, z);
        Cplx D = U - c;
        Cplx q0 = U2 * h0 / D;
        Cplx h2 = -2.0 * sgn * alpha * h1 + q0;
        Cplx q1 = (U3 * h0 + U2 * h1 - q0 * U1) / D;
        Cplx h3 = -2.0 * sgn * alpha * h2 + q1;
        h[i] = CVec4(h0, h1, h2, h3);
    }
    return h;
}

ModeFunction assemble_slow_mode(const std::vector<CVec4>& psi, const SlowContext& ctx) {
    const auto& grid = *ctx.grid;
    const int n = static_cast<int>(grid.size());
    const double alpha = ctx.pt.alpha;
    const int sgn = ctx.sgn;
    const Cplx eps = ctx.pt.eps();
    const Profile& p = ctx.profile;

    ModeFunction m;
    m.sigma = std::max(alpha, 1.0);
    RenormTrajectory tr;
    tr.dim = 4;
    tr.nodes = grid;
    tr.values.resize(n);
    tr.derivs.resize(n);
    tr.expo.resize(n);
    tr.expo_deriv.resize(n);
    const Cplx sa = sgn * alpha;
    for (int i = 0; i < n; ++i) {
        // phi^(k) e^{-g} = sum_j C(k,j) (sgn a)^{k-j} psi^(j)
        CVec4 s;
        s[0] = psi[i][0];
        s[1] = sa * psi[i][0] + psi[i][1];
        s[2] = sa * sa * psi[i][0] + 2.0 * sa * psi[i][1] + psi[i][2];
        s[3] = sa * sa * sa * psi[i][0] + 3.0 * sa * sa * psi[i][1] +
               3.0 * sa * psi[i][2] + psi[i][3];
        CVec v(4);
        Cplx sc = 1.0;
        for (int k = 0; k < 4; ++k) {
            v[k] = s[k] / sc;
            sc *= m.sigma;
        }
        tr.values[i] = v;
        tr.expo[i] = sa * grid[i];
        tr.expo_deriv[i] = sa;
    }
    // Factor derivatives: s_k' = sigma s_{k+1} - g' s_k; top row from the OS ODE.
    for (int i = 0; i < n; ++i) {
        double z = grid[i];
        Cplx b = p.u(z) - ctx.pt.c + 2.0 * eps * alpha * alpha;
        Cplx a = alpha * alpha * (eps * alpha * alpha + p.u(z) - ctx.pt.c) + p.ddu(z);
        CVec d(4);
        const CVec& v = tr.values[i];
        for (int k = 0; k < 3; ++k) d[k] = m.sigma * v[k + 1] - sa * v[k];
        Cplx s3p = (b * m.sigma * m.sigma * v[2] - a * v[0]) / (eps * m.sigma * m.sigma * m.sigma) -
                   sa * v[3];
        d[3] = s3p;
        tr.derivs[i] = d;
    }
    // Normalize the bounded factor to 1 at z_max.
    Cplx scale = 1.0 / tr.values.back()[0];
    for (int i = 0; i < n; ++i) {
        tr.values[i] *= scale;
        tr.derivs[i] *= scale;
    }
    m.stack = std::move(tr);
    if (sgn < 0) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s = std::max(s, std::abs(m.stack.values[i][0]) * std::exp(-alpha * grid[i]));
        m.sup_abs = s;
    }
    return m;
}

}  // namespace

ErrorTriplet iter_step(const ErrorTriplet& e, const SlowContext& ctx) {
    return corrector_step(e, ctx).e_next;
}

SlowModesResult slow_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const RayleighBasis& basis, const FastScalarPair& pair,
                           const Config& cfg) {
    SpectralPoint pt{alpha, c, reynolds};
    double gate = alpha / (pair.rates.m_f * pair.rates.m_f) *
                  (1.0 + 1.0 / std::abs(basis.evans));
    if (gate > cfg.iter_gate)
        throw SubcriticalityError(
            "slow_modes: iteration gate alpha m_f^-2 (1+1/|E|) exceeds threshold", gate);

    auto grid = layer_grid(p.z_max, pair.rates.M_f);
    SlowModesResult out;

    for (int sgn : {-1, +1}) {
        SlowContext ctx;
        ctx.profile = p;
        ctx.pt = pt;
        ctx.sgn = sgn;
        ctx.eta = basis.eta;
        ctx.rayleigh = &basis;
        ctx.pair = &pair;
        ctx.grid = grid;

        const auto& tr0 = (sgn < 0) ? basis.minus : basis.plus_norm;
        std::vector<CVec4> psi = rayleigh_factor_stack(tr0, ctx);
        ErrorTriplet e = initial_error(psi, ctx);

        IterationReport rep;
        rep.gate_value = gate;
        double e0 = e.norm_eta2(ctx.eta, alpha);
        rep.error_norms.push_back(e0);
        double floor = std::max(1e-10 * e0, 1e-13 * (1.0 + alpha * alpha) * (1.0 + std::abs(c)));
        double prev = e0;
        for (int it = 0; it < cfg.max_slow_iters && prev > floor; ++it) {
            CorrectorStacks st = corrector_step(e, ctx);
            for (size_t i = 0; i < psi.size(); ++i)
                psi[i] += st.psi_corr[i] + st.phi_corr[i];
            e = std::move(st.e_next);
            double en = e.norm_eta2(ctx.eta, alpha);
            rep.error_norms.push_back(en);
            double ratio = en / prev;
            rep.ratios.push_back(ratio);
            rep.iterations = it + 1;
            if (ratio >= 1.0 && en > 100.0 * floor)
                throw ContractionError("slow_modes: corrector iteration diverges", ratio);
            prev = en;
            if (ratio >= 0.9 && en <= 100.0 * floor) break;  // quadrature noise floor
        }

        ModeFunction mode = assemble_slow_mode(psi, ctx);
        // Closeness diagnostic || psi_s - psi_alpha ||_eta on the bounded factors.
        std::vector<CVec4> base = rayleigh_factor_stack(tr0, ctx);
        double drift = 0.0;
        Cplx norm0 = psi.back()[0];
        Cplx normb = base.back()[0];
        for (size_t i = 0; i < psi.size(); ++i) {
            Cplx d = psi[i][0] / norm0 - base[i][0] / normb;
            drift = std::max(drift, std::abs(d) * std::exp(ctx.eta * (*grid)[i]));
        }
        if (sgn < 0) {
            out.minus = std::move(mode);
            out.report_minus = rep;
            out.drift_minus = drift;
        } else {
            out.plus = std::move(mode);
            out.report_plus = rep;
            out.drift_plus = drift;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fast modes by partial diagonalization
// ---------------------------------------------------------------------------

namespace {

struct FastCoeffs {
    const Profile* p;
    double alpha;
    Cplx c, eps;

    Cplx a(double z) const {
        return alpha * alpha * (eps * alpha * alpha + p->u(z) - c) + p->ddu(z);
    }
    Cplx b(double z) const { return p->u(z) - c + 2.0 * eps * alpha * alpha; }
    // Fast characteristic root (larger-modulus root of -eps m^4 + b m^2 - a).
    Cplx mu_hat(double z) const {
        Cplx bb = b(z);
        Cplx S = std::sqrt(bb * bb - 4.0 * eps * a(z));
        Cplx r1 = (bb + S) / (2.0 * eps), r2 = (bb - S) / (2.0 * eps);
        Cplx r = (std::abs(r1) >= std::abs(r2)) ? r1 : r2;
        Cplx m = std::sqrt(r);
        if (m.real() < 0.0) m = -m;
        if (m.real() <= 0.0)
            throw BranchError("fast_modes: Re mu_hat <= 0");
        return m;
    }
    Cplx mu_hat_prime(double z) const {
        Cplx m, mp;
        eval_pair(z, m, mp);
        return mp;
    }
    void eval_pair(double z, Cplx& m, Cplx& mp) const {
        Cplx bb = b(z);
        Cplx S = std::sqrt(bb * bb - 4.0 * eps * a(z));
        Cplx r1 = (bb + S) / (2.0 * eps), r2 = (bb - S) / (2.0 * eps);
        Cplx r = (std::abs(r1) >= std::abs(r2)) ? r1 : r2;
        if (std::abs(r) == std::abs(r2) && std::abs(r1) < std::abs(r2)) S = -S;
        m = std::sqrt(r);
        if (m.real() < 0.0) m = -m;
        if (m.real() <= 0.0) throw BranchError("fast_modes: Re mu_hat <= 0");
        Cplx Sc = 2.0 * eps * m * m - bb;  // branch consistent with the chosen root
        Cplx bp = p->du(z);
        Cplx ap = alpha * alpha * p->du(z) + p->deriv(3, z);
        Cplx Sp = (std::abs(Sc) > 1e-14 * std::abs(bb)) ? (bb * bp - 2.0 * eps * ap) / Sc
                                                        : Cplx(0.0);
        mp = (bp + Sp) / (4.0 * eps * m);
    }
};

}  // namespace

FastModesResult fast_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg) {
    SpectralPoint pt{alpha, c, reynolds};
    if (!admissible(p, alpha, c, cfg.eps0))
        throw ParameterError("fast_modes: (alpha, c) violates the admissibility gate");
    FastCoeffs fc{&p, alpha, c, pt.eps()};
    FastRates rates = fast_rates(p, alpha, c, reynolds, cfg);
    const double sig = 0.5 * (rates.m_f + rates.M_f);

    auto grid_ptr = layer_grid(p.z_max, rates.M_f);
    const auto& grid = *grid_ptr;
    const int n = static_cast<int>(grid.size());

    FastModesResult out;
    out.report.sqrt_eps_abs = std::sqrt(std::abs(pt.eps()));

    for (int sgn : {-1, +1}) {
        // Scaled deflated system matrix for Zhat, augmented with the Z1 source.
        auto fill_M = [&](double z, CMat& A) {
            Cplx mu = Cplx(sgn, 0) * fc.mu_hat(z);
            Cplx bz = fc.b(z);
            A.setZero();
            A(0, 0) = -2.0 * mu;
            A(0, 1) = sig;
            A(1, 0) = -mu * mu / sig;
            A(1, 1) = -mu;
            A(1, 2) = sig;
            A(2, 0) = -mu * mu * mu / (sig * sig);
            A(2, 1) = bz / (fc.eps * sig);
            A(2, 2) = -mu;
        };
        auto mu_zero = [](double) { return Cplx(0.0); };

        IntegrateOptions opts;
        opts.rtol = cfg.ode_rtol;
        opts.atol = cfg.ode_atol;
        opts.max_step = [&](double z) {
            return 1.2 / (2.0 * std::abs(fc.mu_hat(z)) + alpha + 1.0);
        };
        opts.h_init = 1e-4;

        // Cumulative log(mu_hat) for the WKB amplitude mu_hat^(-5/2); also
        // used below to fold the amplitude into the stored exponent.
        std::vector<Cplx> logratio(n, 0.0);
        for (int i = 1; i < n; ++i)
            logratio[i] = logratio[i - 1] +
                          std::log(fc.mu_hat(grid[i]) / fc.mu_hat(grid[i - 1]));
        // Seed Z1 with the one-pass solve of the coupled (Z1, Zhat) system:
        // the fixed point is a linear ODE, so a single renormalized
        // integration lands on it and the Picard loop below verifies it and
        // reports the contraction behavior.
        std::vector<Cplx> Z1(n), Z1d(n);
        {
            auto Mc = [&](double z, CMat& A) {
                Cplx mu, mup;
                fc.eval_pair(z, mu, mup);
                Cplx bz = fc.b(z);
                Cplx m = Cplx(sgn, 0) * mu;
                A.setZero();
                A(0, 1) = sig;
                A(1, 1) = -2.0 * m;
                A(1, 2) = sig;
                A(2, 1) = -m * m / sig;
                A(2, 2) = -m;
                A(2, 3) = sig;
                A(3, 1) = -m * m * m / (sig * sig);
                A(3, 2) = bz / (fc.eps * sig);
                A(3, 3) = -m;
                A(1, 0) = -Cplx(sgn, 0) * mup / sig;
                A(2, 0) = -2.0 * mu * mup / (sig * sig);
                A(3, 0) = -Cplx(sgn, 0) * 3.0 * mu * mu * mup / (sig * sig * sig);
            };
            auto mu_zero0 = [](double) { return Cplx(0.0); };
            IntegrateOptions o2;
            o2.rtol = cfg.ode_rtol;
            o2.atol = cfg.ode_atol;
            o2.max_step = [&](double z) {
                return 1.2 / (2.0 * std::abs(fc.mu_hat(z)) + alpha + 1.0);
            };
            o2.h_init = 1e-4;
            CVec init = CVec::Zero(4);
            init[0] = 1.0;
            RenormTrajectory seed = integrate_renormalized_inplace(
                Mc, mu_zero0, sgn < 0 ? Direction::backward : Direction::forward, init,
                {0.0, p.z_max}, o2);
            for (int i = 0; i < n; ++i) {
                CVec v = seed.eval(grid[i]);
                Z1[i] = v[0];
                Z1d[i] = sig * v[1];
            }
        }
        PicardReport rep;
        RenormTrajectory zt;
        double prev_corr = -1.0;
        for (int it = 0; it < cfg.max_picard; ++it) {
            auto z1v = std::make_shared<std::vector<Cplx>>(Z1);
            auto z1d = std::make_shared<std::vector<Cplx>>(Z1d);
            auto Z1fun = hermite_fn(grid_ptr, z1v, z1d);
            auto Maug = [&](double z, CMat& A) {
                fill_M(z, A);
                Cplx mu, mup;
                fc.eval_pair(z, mu, mup);
                Cplx z1 = Z1fun(z);
                A(0, 3) = -Cplx(sgn, 0) * mup / sig * z1;
                A(1, 3) = -2.0 * mu * mup / (sig * sig) * z1;
                A(2, 3) = -Cplx(sgn, 0) * 3.0 * mu * mu * mup / (sig * sig * sig) * z1;
            };
            CVec init = CVec::Zero(4);
            init[3] = 1.0;
            zt = integrate_renormalized_inplace(
                Maug, mu_zero, sgn < 0 ? Direction::backward : Direction::forward, init,
                {0.0, p.z_max}, opts);

            // Z1_new by integrating Z1' = sigma Zhat1 from the anchor.
            std::vector<Cplx> Z1n(n), Z1nd(n);
            // cumulative integral of Zhat1 over the trajectory, sampled on grid
            std::vector<Cplx> cum(zt.nodes.size(), 0.0);
            for (size_t i = 1; i < zt.nodes.size(); ++i) {
                double h = zt.nodes[i] - zt.nodes[i - 1];
                Cplx f0 = zt.values[i - 1][0], f1 = zt.values[i][0];
                Cplx d0 = zt.derivs[i - 1][0], d1 = zt.derivs[i][0];
                cum[i] = cum[i - 1] + h / 2.0 * (f0 + f1) + h * h / 12.0 * (d0 - d1);
            }
            auto cum_at = [&](double z) -> Cplx {
                int i = locate_segment(zt.nodes, z);
                double h = zt.nodes[i + 1] - zt.nodes[i];
                double s = (z - zt.nodes[i]) / h;
                Cplx f0 = zt.values[i][0], f1 = zt.values[i + 1][0];
                Cplx d0 = zt.derivs[i][0], d1 = zt.derivs[i + 1][0];
                // exact partial integral of the cubic Hermite on the segment
                double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
                double i00 = s - s3 + 0.5 * s4;
                double i10 = 0.5 * s2 - (2.0 / 3.0) * s3 + 0.25 * s4;
                double i01 = s3 - 0.5 * s4;
                double i11 = 0.25 * s4 - s3 / 3.0;
                return cum[i] +
                       h * (i00 * f0 + i01 * f1 + h * (i10 * d0 + i11 * d1));
            };
            Cplx total = cum_at(p.z_max);
            for (int i = 0; i < n; ++i) {
                if (sgn < 0)
                    Z1n[i] = 1.0 - sig * (total - cum_at(grid[i]));
                else
                    Z1n[i] = 1.0 + sig * cum_at(grid[i]);
                Z1nd[i] = sig * zt.eval(grid[i])[0];
            }
            double corr = 0.0;
            for (int i = 0; i < n; ++i) corr = std::max(corr, std::abs(Z1n[i] - Z1[i]));
            rep.correction_norms.push_back(corr);
            bool stalled = false;
            bool converged = corr < 1e-9;
            if (prev_corr > 0.0) {
                double ratio = corr / std::max(prev_corr, 1e-300);
                rep.ratios.push_back(ratio);
                rep.final_factor =
                    *std::min_element(rep.ratios.begin(), rep.ratios.end());
                if (corr > 1e3 * (1.0 + rep.correction_norms.front()))
                    throw SubcriticalityError("fast_modes: fixed point diverges", ratio);
                // quadrature floor for strongly oscillatory (lower half plane)
                // points: corrections stop contracting below the mode residual
                // target and it is pointless to keep sweeping
                stalled = (it >= 6 && ratio >= 0.5 && corr < 1e-6);
            }
            Z1 = std::move(Z1n);
            Z1d = std::move(Z1nd);
            rep.iterations = it + 1;
            prev_corr = corr;
            if (converged || stalled) break;
            if (it + 1 == cfg.max_picard) {
                if (rep.final_factor > cfg.fast_gate)
                    throw SubcriticalityError(
                        "fast_modes: fixed-point contraction factor exceeds gate",
                        rep.final_factor);
                throw IterationBudgetError("fast_modes: iteration budget exhausted");
            }
        }

        // Assemble the mode stack s_k = Z1 (mu/sig)^k + Zhat_k on the grid.
        // The stored exponent is g = sgn int mu_hat - (5/2) log(mu_hat/mu_hat(0)):
        // the fourth-order fast-mode WKB amplitude is mu_hat^(-5/2) (from the
        // -2 eps m^3 A' - 5 eps m^2 m' A = 0 balance), and folding it into the
        // prefactor keeps the bounded factor 1 + O(sqrt(eps)). The amplitude
        // term has the exact antiderivative (5/2) log(mu_hat).
        ModeFunction mode;
        mode.sigma = sig;
        RenormTrajectory tr;
        tr.dim = 4;
        tr.nodes = grid;
        tr.values.resize(n);
        tr.derivs.resize(n);
        tr.expo.resize(n);
        tr.expo_deriv.resize(n);
        tr.expo[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            double h = grid[i] - grid[i - 1];
            Cplx acc = 0.0;
            for (int q = 0; q < 5; ++q)
                acc += G5W[q] * fc.mu_hat(grid[i - 1] + h * G5X[q]);
            tr.expo[i] = tr.expo[i - 1] + Cplx(sgn, 0) * h * acc;
        }
        for (int i = 0; i < n; ++i) {
            tr.expo[i] -= 2.5 * logratio[i];
            tr.expo_deriv[i] = Cplx(sgn, 0) * fc.mu_hat(grid[i]) -
                               2.5 * fc.mu_hat_prime(grid[i]) / fc.mu_hat(grid[i]);
        }
        for (int i = 0; i < n; ++i) {
            double z = grid[i];
            Cplx mu = Cplx(sgn, 0) * fc.mu_hat(z);
            Cplx mup = Cplx(sgn, 0) * fc.mu_hat_prime(z);
            Cplx amp = std::exp(2.5 * logratio[i]);
            Cplx ampd = 2.5 * fc.mu_hat_prime(z) / fc.mu_hat(z);
            CVec zh = zt.eval(z);
            CVec zhd = zt.eval_deriv(z);
            CVec v(4), d(4);
            Cplx ms = mu / sig;
            Cplx msp = mup / sig;
            v[0] = Z1[i];
            d[0] = Z1d[i];
            for (int k = 1; k < 4; ++k) {
                Cplx pw = std::pow(ms, k);
                v[k] = Z1[i] * pw + zh[k - 1];
                d[k] = Z1d[i] * pw +
                       Z1[i] * Cplx(k, 0) * std::pow(ms, k - 1) * msp + zhd[k - 1];
            }
            // amplitude fold: values *= amp, derivs adjusted by the log slope
            for (int k = 0; k < 4; ++k) {
                d[k] = amp * (d[k] + v[k] * ampd);
                v[k] = amp * v[k];
            }
            tr.values[i] = v;
            tr.derivs[i] = d;
        }
        Cplx anchor = (sgn < 0) ? tr.values.back()[0] : tr.values.front()[0];
        for (int i = 0; i < n; ++i) {
            tr.values[i] /= anchor;
            tr.derivs[i] /= anchor;
        }
        double dev = std::abs((sgn < 0 ? tr.values.front()[0] : tr.values.back()[0]) - 1.0);
        mode.stack = std::move(tr);
        if (sgn < 0) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s = std::max(s, std::abs(mode.stack.values[i][0]) *
                                    std::exp(mode.stack.expo[i].real()));
            mode.sup_abs = s;
            out.minus = std::move(mode);
            out.report.minus = rep;
            out.report.factor_dev_minus = dev;
        } else {
            out.plus = std::move(mode);
            out.report.plus = rep;
            out.report.factor_dev_plus = dev;
        }
    }
    return out;
}

OSModeBasis build_os_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg) {
    OSModeBasis basis;
    basis.pt = {alpha, c, reynolds};
    basis.profile = p;
    basis.rayleigh = rayleigh_modes(p, alpha, c, cfg);
    basis.eta = basis.rayleigh.eta;
    FastScalarPair pair = airy_pair(p, alpha, c, reynolds, cfg);
    basis.rates = pair.rates;
    basis.grid = layer_grid(p.z_max, pair.rates.M_f);

    SlowModesResult sm = slow_modes(p, alpha, c, reynolds, basis.rayleigh, pair, cfg);
    basis.s_minus = std::move(sm.minus);
    basis.s_plus = std::move(sm.plus);
    basis.iter_minus = sm.report_minus;
    basis.iter_plus = sm.report_plus;
    basis.psi_drift_minus = sm.drift_minus;
    basis.psi_drift_plus = sm.drift_plus;

    FastModesResult fm = fast_modes(p, alpha, c, reynolds, cfg);
    basis.f_minus = std::move(fm.minus);
    basis.f_plus = std::move(fm.plus);
    basis.fast_report = fm.report;
    return basis;
}

// ---------------------------------------------------------------------------
// Adjoint basis
// ---------------------------------------------------------------------------

AdjointBasis adjoint_basis(const OSModeBasis& modes,
                           const std::function<CMat4(double)>& B_field,
                           const std::function<CMat4(double)>& B_field_deriv,
                           double cond_limit) {
    AdjointBasis adj;
    adj.grid = modes.grid;
    const auto& grid = *modes.grid;
    const int n = static_cast<int>(grid.size());
    adj.rows.resize(n);
    adj.rows_deriv.resize(n);
    const ModeFunction* mf[4] = {&modes.s_minus, &modes.f_minus, &modes.s_plus,
                                 &modes.f_plus};
    for (int i = 0; i < n; ++i) {
        double x = grid[i];
        CMat4 S, Sd;
        for (int j = 0; j < 4; ++j) {
            S.col(j) = mf[j]->factor_stack(x);
            Sd.col(j) = mf[j]->factor_stack_deriv(x);
        }
        CMat4 B = B_field(x);
        CMat4 BS = B * S;
        // Row/column equilibration before inversion.
        Eigen::Vector4d rs, cs;
        for (int r = 0; r < 4; ++r) rs[r] = 1.0 / std::max(BS.row(r).cwiseAbs().maxCoeff(), 1e-300);
        CMat4 BS1 = rs.asDiagonal() * BS;
        for (int cidx = 0; cidx < 4; ++cidx)
            cs[cidx] = 1.0 / std::max(BS1.col(cidx).cwiseAbs().maxCoeff(), 1e-300);
        CMat4 BS2 = BS1 * cs.asDiagonal();
        Eigen::FullPivLU<CMat4> lu(BS2);
        double cond = std::abs(lu.maxPivot()) /
                      std::max(std::abs(lu.matrixLU()(3, 3)), 1e-300);
        adj.max_condition = std::max(adj.max_condition, cond);
        if (cond > cond_limit)
            throw IllConditionedError("adjoint_basis: mode matrix ill-conditioned", x);
        CMat4 inv = cs.asDiagonal() * lu.inverse() * rs.asDiagonal();
        adj.rows[i] = inv;
        // Derivative of the stored (factor-level) inverse, for Hermite
        // interpolation between nodes. Exponents live in the evaluator.
        CMat4 Bd = B_field_deriv ? B_field_deriv(x) : CMat4::Zero().eval();
        CMat4 dBS = Bd * S + B * Sd;
        adj.rows_deriv[i] = -inv * dBS * inv;
    }
    return adj;
}

CMat4 AdjointBasis::rows_at(double x) const {
    const auto& g = *grid;
    int i = locate_segment(g, x);
    return hermite_eval<CMat4>(x, g[i], g[i + 1], rows[i], rows[i + 1],
                               rows_deriv[i], rows_deriv[i + 1]);
}

namespace {

// Fornberg weights for the first derivative at x0 from the given stencil.
std::vector<double> fd1_weights(double x0, const double* x, int m) {
    std::vector<double> c(2 * m, 0.0);  // columns: order 0 and 1
    auto C = [&](int i, int k) -> double& { return c[2 * i + k]; };
    double c1 = 1.0, c4 = x[0] - x0;
    C(0, 0) = 1.0;
    for (int i = 1; i < m; ++i) {
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                C(i, 1) = c1 * (C(i - 1, 0) - c5 * C(i - 1, 1)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            C(j, 1) = (c4 * C(j, 1) - C(j, 0)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(m);
    for (int i = 0; i < m; ++i) w[i] = C(i, 1);
    return w;
}

}  // namespace

double os_residual(const ModeFunction& mode, const Profile& p, const SpectralPoint& pt) {
    const auto& tr = mode.stack;
    const Cplx eps = pt.eps();
    const double alpha = pt.alpha;
    double worst = 0.0;
    const auto& g = tr.nodes;
    // Fourth-order one-dimensional stencil on the stored nodes: honest (uses
    // top-component values only), step matched to the local grid resolution.
    for (size_t i = 2; i + 2 < g.size(); i += 2) {
        double z = g[i];
        auto w = fd1_weights(z, &g[i - 2], 5);
        Cplx s3p = 0.0;
        for (int j = 0; j < 5; ++j) s3p += w[j] * tr.values[i - 2 + j][3];
        const CVec& s = tr.values[i];
        Cplx mu = tr.expo_deriv[i];
        (void)z;
        Cplx sig3 = mode.sigma * mode.sigma * mode.sigma;
        Cplx phi4 = sig3 * (s3p + mu * s[3]);  // e^{-g} phi''''
        Cplx b = p.u(g[i]) - pt.c + 2.0 * eps * alpha * alpha;
        Cplx a = alpha * alpha * (eps * alpha * alpha + p.u(z) - pt.c) + p.ddu(z);
        Cplx res = -eps * phi4 + b * mode.sigma * mode.sigma * s[2] - a * s[0];
        double scale = std::abs(eps * phi4) + std::abs(b * mode.sigma * mode.sigma * s[2]) +
                       std::abs(a * s[0]);
        if (scale > 1e-280) worst = std::max(worst, std::abs(res) / scale);
    }
    return worst;
}

}  // namespace oswald
