#pragma once

#include "oswald/airy.hpp"
#include "oswald/modes.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Jump-matrix inverse [G]^-1 at x for L = -eps d^4 + b d^2 - a:
///   [[b', b, 0, -eps], [-b, 0, eps, 0], [0, -eps, 0, 0], [eps, 0, 0, 0]].
/// For Orr-Sommerfeld: b = U - c + 2 eps alpha^2, b' = U'.
CMat4 jump_matrix(Cplx b, Cplx bprime, Cplx eps);
/// The forward jump [G]_{z=x} = (1/eps^2) [[0, eps J], [eps J, B]].
CMat4 jump_matrix_forward(Cplx b, Cplx bprime, Cplx eps);

/// Orr-Sommerfeld jump-matrix inverse as a function of x.
std::function<CMat4(double)> os_jump_field(const Profile& p, const SpectralPoint& pt);
std::function<CMat4(double)> os_jump_field_deriv(const Profile& p,
                                                 const SpectralPoint& pt);

/// Normalized Evans function D(alpha, c) = mu_f(0)^-1 W[phi_s, phi_f](0) with
/// the decaying modes renormalized to unit sup norm.
Cplx viscous_evans(const OSModeBasis& modes);

/// Assembled half-line Green kernel of the OS operator with clamped boundary
/// conditions; evaluates d_x^k d_z^l G for k + l <= 3 without overflow.
struct GreenKernel {
    OSModeBasis modes;
    AdjointBasis adjoints;
    CMat2 M;      // coefficient matrix [Pi1 Phi(0)]^-1 Pi1 Psi(0)
    Cplx evans;   // D(alpha, c)

    Cplx eval(double x, double z, int k = 0, int l = 0) const;
    /// One-sided branch value at z (upper: the z >= x expression).
    Cplx eval_branch(double x, double z, int k, int l, bool upper) const;
    /// Exact jump [d_x^k d_z^l G]_{z=x} from the two branch limits.
    Cplx jump(double x, int k, int l) const {
        return eval_branch(x, x, k, l, true) - eval_branch(x, x, k, l, false);
    }
    Cplx vorticity(double x, double z) const;  // Delta_alpha G in z
};

GreenKernel halfline_green(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg = default_config());
GreenKernel halfline_green(OSModeBasis modes, const Config& cfg = default_config());

/// d_x^k d_z^l G, k + l <= 3 (beyond third order the distributional jump
/// enters).
Cplx green_derivatives(const GreenKernel& kernel, double x, double z, int k, int l);

/// Vorticity split Delta_alpha G = G_a + R_G with
/// R_G(x,z) = int G_a(y,z) U''(y) G(x,y) dy.
struct VorticitySplit {
    Cplx g_a;
    Cplx r_g;
};
VorticitySplit vorticity_split(const GreenKernel& kernel, const FastScalarPair& pair,
                               double x, double z, double quad_tol = 1e-10);

}  // namespace oswald
