#include "oswald/airy.hpp"

#include <cmath>

#include "oswald/quadrature.hpp"
#include "oswald/separable.hpp"

namespace oswald {

namespace {

Cplx mu_f_of(const Profile& p, double alpha, Cplx c, Cplx eps, double z) {
    return std::sqrt(alpha * alpha + (p.u(z) - c) / eps);
}

}  // namespace

FastRates fast_rates(const Profile& p, double alpha, Cplx c, double reynolds,
                     const Config& cfg) {
    if (reynolds <= 0.0) throw ParameterError("fast_rates: R must be positive");
    if (!admissible(p, alpha, c, cfg.eps0))
        throw ParameterError("fast_rates: (alpha, c) violates the admissibility gate");
    Cplx eps = SpectralPoint{alpha, c, reynolds}.eps();
    const int n = 4096;
    double lo = 1e300, hi = -1e300;
    double z_lo = 0.0, z_hi = 0.0;
    for (int i = 0; i <= n; ++i) {
        double z = p.z_max * i / n;
        double re = mu_f_of(p, alpha, c, eps, z).real();
        if (re <= 0.0) throw BranchError("fast_rates: Re mu_f <= 0 on the grid");
        if (re < lo) lo = re, z_lo = z;
        if (re > hi) hi = re, z_hi = z;
    }
    // Golden-section polish around the coarse extrema.
    auto re_at = [&](double z) { return mu_f_of(p, alpha, c, eps, z).real(); };
    auto polish = [&](double z0, double sign) {
        double a = std::max(0.0, z0 - p.z_max / n), b = std::min(p.z_max, z0 + p.z_max / n);
        const double gr = 0.382;
        for (int it = 0; it < 60; ++it) {
            double m1 = a + gr * (b - a), m2 = b - gr * (b - a);
            if (sign * re_at(m1) < sign * re_at(m2)) b = m2; else a = m1;
        }
        return re_at(0.5 * (a + b));
    };
    FastRates r;
    r.m_f = std::min(lo, polish(z_lo, +1.0));
    r.M_f = std::max(hi, polish(z_hi, -1.0));
    return r;
}

Cplx FastScalarPair::mu_f(double z) const {
    return mu_f_of(profile, pt.alpha, pt.c, pt.eps(), z);
}

double FastScalarPair::wronskian_drift() const {
    double drift = 0.0;
    const auto& nodes = psi_minus.nodes;
    for (size_t i = 0; i < nodes.size(); i += std::max<size_t>(1, nodes.size() / 64)) {
        double z = nodes[i];
        CVec m = psi_minus.eval(z), p = psi_plus.eval(z);
        Cplx w = sigma * (m[0] * p[1] - p[0] * m[1]);
        drift = std::max(drift, std::abs(w - wronskian) / std::abs(wronskian));
    }
    return drift;
}

FastScalarPair airy_pair(const Profile& p, double alpha, Cplx c, double reynolds,
                         const Config& cfg) {
    FastScalarPair pair;
    pair.pt = {alpha, c, reynolds};
    pair.profile = p;
    pair.rates = fast_rates(p, alpha, c, reynolds, cfg);
    double sig = 0.5 * (pair.rates.m_f + pair.rates.M_f);
    pair.sigma = sig;
    Cplx eps = pair.pt.eps();

    // Scaled system for Y = diag(1, 1/sigma) (psi, psi'):
    //   Y' = [[0, sigma], [mu_f^2 / sigma, 0]] Y.
    auto A = [&, eps](double z) {
        CMat M(2, 2);
        Cplx mu = mu_f_of(p, alpha, c, eps, z);
        M(0, 0) = 0.0;
        M(0, 1) = sig;
        M(1, 0) = mu * mu / sig;
        M(1, 1) = 0.0;
        return M;
    };
    IntegrateOptions opts;
    opts.rtol = cfg.ode_rtol;
    opts.atol = cfg.ode_atol;
    opts.max_step = [&, eps](double z) {
        return 1.2 / (std::abs(mu_f_of(p, alpha, c, eps, z)) + alpha + 1.0);
    };
    opts.h_init = opts.max_step(p.z_max);

    auto mu_minus = [&, eps](double z) { return -mu_f_of(p, alpha, c, eps, z); };
    auto mu_plus = [&, eps](double z) { return mu_f_of(p, alpha, c, eps, z); };

    CVec init_m(2), init_p(2);
    init_m << 1.0, -mu_f_of(p, alpha, c, eps, p.z_max) / sig;
    init_p << 1.0, mu_f_of(p, alpha, c, eps, 0.0) / sig;
    pair.psi_minus = integrate_renormalized(A, mu_minus, Direction::backward, init_m,
                                            {0.0, p.z_max}, opts);
    pair.psi_plus = integrate_renormalized(A, mu_plus, Direction::forward, init_p,
                                           {0.0, p.z_max}, opts);
    for (size_t i = 0; i < pair.psi_minus.nodes.size(); ++i) {
        double re = (-pair.psi_minus.expo_deriv[i]).real();
        if (re <= 0.0) throw BranchError("airy_pair: Re mu_f <= 0 along psi_minus");
    }
    {
        double z = p.z_max;
        CVec m = pair.psi_minus.eval(z), q = pair.psi_plus.eval(z);
        pair.wronskian = pair.sigma * (m[0] * q[1] - q[0] * m[1]);
    }
    return pair;
}

namespace {

// (log prefactor, factor) of d_z^k psi at z for one branch.
struct BranchVal {
    Cplx logpre;
    Cplx factor;
};

BranchVal branch_eval(const RenormTrajectory& tr, Cplx sigma, double z, int k) {
    CVec f = tr.eval(z);
    return {tr.expo_at(z), k == 0 ? f[0] : sigma * f[1]};
}

}  // namespace

Cplx airy_kernel_deriv(const FastScalarPair& pair, double x, double z, int k, int l) {
    if (k > 1 || l > 1) throw ParameterError("airy_kernel_deriv: k,l <= 1");
    const Cplx eps = pair.pt.eps();
    double hi = std::max(x, z), lo = std::min(x, z);
    // z-side stack index: kernel carries psi_-(larger arg), psi_+(smaller).
    BranchVal big, small;
    if (z >= x) {
        big = branch_eval(pair.psi_minus, pair.sigma, hi, k);
        small = branch_eval(pair.psi_plus, pair.sigma, lo, l);
    } else {
        big = branch_eval(pair.psi_minus, pair.sigma, hi, l);
        small = branch_eval(pair.psi_plus, pair.sigma, lo, k);
    }
    Cplx logpre = big.logpre + small.logpre;  // = -int_lo^hi mu_f, decaying
    return std::exp(logpre) * big.factor * small.factor / (eps * pair.wronskian);
}

Cplx airy_kernel(const FastScalarPair& pair, double x, double z) {
    return airy_kernel_deriv(pair, x, z, 0, 0);
}

AirySolution airy_solve(const FastScalarPair& pair, const ScalarField& f, double f_eta,
                        int l, std::shared_ptr<const std::vector<double>> out_grid,
                        double quad_tol) {
    const double alpha = pair.pt.alpha;
    const Cplx c = pair.pt.c;
    const Cplx eps = pair.pt.eps();
    const Profile& p = pair.profile;
    if (f_eta >= alpha)
        throw WeightError("airy_solve: weight eta must satisfy eta < alpha");
    if (l < 0 || l > 1) throw ParameterError("airy_solve: l in {0, 1}");

    AirySolution sol;
    sol.w.grid = out_grid;
    sol.v.grid = out_grid;
    const auto& g = *out_grid;
    const size_t n = g.size();

    // P^-1 by the damped separable sweep (grid segments bound the panels, so
    // the wall layer is integrated at the resolution it is stored at).
    auto sample = [&](double x) { return l == 0 ? f.f(x) : f.d1(x); };
    SepSolveResult w = separable_solve(g, pair.psi_minus, pair.sigma, pair.psi_plus,
                                       pair.sigma, sample, 0.0,
                                       1.0 / (eps * pair.wronskian));
    sol.w.f0 = std::move(w.u);
    sol.w.f1 = std::move(w.du);
    sol.w.f2.resize(n);
    for (size_t i = 0; i < n; ++i) {
        Cplx mu = pair.mu_f(g[i]);
        // P w = d^l f  =>  w'' = mu_f^2 w - (d^l f)/eps.
        sol.w.f2[i] = mu * mu * sol.w.f0[i] - sample(g[i]) / eps;
    }

    // Delta_alpha^-1 with the exact kernel -e^(-alpha|x-z|)/(2 alpha).
    auto w0 = std::make_shared<std::vector<Cplx>>(sol.w.f0);
    auto w1 = std::make_shared<std::vector<Cplx>>(sol.w.f1);
    auto wfun = hermite_fn(out_grid, w0, w1);
    RenormTrajectory km = affine_trajectory(-alpha, p.z_max);
    RenormTrajectory kp = affine_trajectory(alpha, p.z_max);
    SepSolveResult v = separable_solve(g, km, 1.0, kp, 1.0, wfun, 0.0,
                                       Cplx(-1.0 / (2.0 * alpha)));
    sol.v.f0 = std::move(v.u);
    sol.v.f1 = std::move(v.du);
    sol.v.f2.resize(n);
    sol.v.f3.resize(n);
    for (size_t i = 0; i < n; ++i) {
        sol.v.f2[i] = alpha * alpha * sol.v.f0[i] + sol.w.f0[i];
        sol.v.f3[i] = alpha * alpha * sol.v.f1[i] + sol.w.f1[i];
    }
    (void)c;
    (void)quad_tol;
    return sol;
}

}  // namespace oswald
