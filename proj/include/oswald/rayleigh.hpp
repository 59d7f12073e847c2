#pragma once

#include "oswald/gridfun.hpp"
#include "oswald/ode.hpp"
#include "oswald/profile.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Homogeneous Rayleigh modes at one (alpha, c):
///   minus:     phi_-(z) = e^(-alpha z) (1 + psi_-),  factor -> 1 at z_max,
///   plus_norm: the unstable solution renormalized to phi_+(0)=0,
///              d_z phi_+(0)=alpha (the combination entering the Green kernel),
///   plus_raw:  the pure-growth Duhamel solution on the tail [tail_M, z_max],
///              kept for the psi_+ decay diagnostics.
/// Both stored trajectories are 2-stacks (phi, phi') of the bounded factor.
struct RayleighBasis {
    SpectralPoint pt;
    Profile profile;
    double eta = 0.5;  // weight rate < min(alpha, eta0) used in construction
    double tail_M = 2.0;

    RenormTrajectory minus;      // exponent -alpha z
    RenormTrajectory plus_norm;  // exponent +alpha z
    TailFunction plus_raw;

    Cplx evans;  // E(alpha, c) = phi_-(0)
    double psi_minus_norm = 0.0;
    double psi_plus_norm = 0.0;
    PicardReport report_minus, report_plus;

    /// phi_-^(k)(z) and normalized phi_+^(k)(z) for k <= 1, split as
    /// (log prefactor, factor) so downstream products cannot overflow.
    Cplx phi_minus(double z, int k = 0) const;
    Cplx phi_plus(double z, int k = 0) const;
    /// Wronskian phi_- phi_+' - phi_+ phi_-' (z-independent up to integration
    /// error; equals alpha E at z = 0).
    Cplx wronskian(double z) const;
};

/// Build the basis by the Duhamel fixed point on the tail plus renormalized
/// backward/forward extension. Throws ParameterError if the admissibility
/// gate fails, ContractionError/IterationBudgetError from the fixed point.
RayleighBasis rayleigh_modes(const Profile& p, double alpha, Cplx c,
                             const Config& cfg = default_config());

/// E(alpha, c) = phi_-(0), analytic in c on the admissible set.
Cplx inviscid_evans(const Profile& p, double alpha, Cplx c,
                    const Config& cfg = default_config());

/// Green kernel of Ray_alpha with the Dirichlet condition at z = 0 built in:
///   G(x,z) = -phi_-(z v x) phi_+(z ^ x) / (alpha E (U(x) - c)).
/// The sign makes Ray_alpha(G(x,.)) = +delta_x, i.e. [d_z G] = 1/(U(x)-c).
Cplx rayleigh_green(const RayleighBasis& basis, double x, double z);
/// d^k/dz^k of the kernel in z away from x, k <= 1.
Cplx rayleigh_green_dz(const RayleighBasis& basis, double x, double z, int k);

/// Exact Rayleigh solver phi(z) = int G(x,z) f(x) dx, sampled with
/// derivatives up to third order on the given output grid.
/// Requires the weight eta of f to satisfy eta < alpha.
SampledFunction rayleigh_solve(const RayleighBasis& basis, const ScalarField& f,
                               double f_eta,
                               std::shared_ptr<const std::vector<double>> out_grid,
                               double quad_tol = 1e-11);

/// Large-alpha certificate: true when alpha >= alpha_big and the scaled
/// contraction factor of the large-alpha Rayleigh iteration is < 1/3, which
/// rules out Rayleigh eigenvalues at this (alpha, c).
bool large_alpha_nonvanishing(const Profile& p, double alpha, Cplx c,
                              double alpha_big = 20.0);

}  // namespace oswald
