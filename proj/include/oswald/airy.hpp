#pragma once

#include "oswald/gridfun.hpp"
#include "oswald/ode.hpp"
#include "oswald/profile.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Extremes of Re mu_f over [0, z_max], mu_f = sqrt(alpha^2 + (U - c)/eps)
/// with the positive-real-part branch.
struct FastRates {
    double m_f = 0.0;  // inf Re mu_f
    double M_f = 0.0;  // sup Re mu_f
};

FastRates fast_rates(const Profile& p, double alpha, Cplx c, double reynolds,
                     const Config& cfg = default_config());

/// Growing/decaying solutions of P psi = 0, P = -eps Delta_alpha + (U - c),
/// carried as renormalized 2-stacks with exponents -/+ int mu_f. sigma is the
/// derivative scale of the stored stacks (psi' = e^expo sigma * factor[1]).
struct FastScalarPair {
    SpectralPoint pt;
    Profile profile;
    FastRates rates;
    Cplx sigma;
    RenormTrajectory psi_minus, psi_plus;
    Cplx wronskian;  // W[psi_-, psi_+], z-independent

    Cplx mu_f(double z) const;
    /// Relative spread of the Wronskian across the grid (constancy check).
    double wronskian_drift() const;
};

FastScalarPair airy_pair(const Profile& p, double alpha, Cplx c, double reynolds,
                         const Config& cfg = default_config());

/// Whole-line Green kernel of P:
///   G_a(x,z) = psi_-(max) psi_+(min) / (eps W[psi_-, psi_+]),
/// normalized so [-eps d_z G_a] = 1 across z = x (P G_a(x,.) = delta_x).
Cplx airy_kernel(const FastScalarPair& pair, double x, double z);
/// d_z^k d_x^l G_a for k, l <= 1.
Cplx airy_kernel_deriv(const FastScalarPair& pair, double x, double z, int k, int l);

/// Airy^-1(d^l f) = Delta_alpha^-1 P^-1 (d^l f) with the exact whole-line
/// Delta_alpha kernel -e^(-alpha|x-z|) / (2 alpha). Returns the solution v
/// (with three derivatives) and w = P^-1(d^l f) (with two), so callers can
/// form Delta_alpha-level quantities exactly.
struct AirySolution {
    SampledFunction v;  // Airy^-1 values, f0..f3
    SampledFunction w;  // P^-1 values, f0..f2
};

AirySolution airy_solve(const FastScalarPair& pair, const ScalarField& f, double f_eta,
                        int l, std::shared_ptr<const std::vector<double>> out_grid,
                        double quad_tol = 1e-11);

}  // namespace oswald
