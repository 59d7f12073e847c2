#include "oswald/green.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "oswald/quadrature.hpp"

namespace oswald {

CMat4 jump_matrix(Cplx b, Cplx bprime, Cplx eps) {
    // Note the (1,1) entry: the conserved adjoint pairing Psi* J Phi and the
    // jump calculus ([dz^3 dx^3 G] = 3 J5' - J6 = -b'/eps^2) both require
    // -b' here.
    CMat4 J = CMat4::Zero();
    J(0, 0) = -bprime;
    J(0, 1) = b;
    J(0, 3) = -eps;
    J(1, 0) = -b;
    J(1, 2) = eps;
    J(2, 1) = -eps;
    J(3, 0) = eps;
    return J;
}

CMat4 jump_matrix_forward(Cplx b, Cplx bprime, Cplx eps) {
    CMat4 G = CMat4::Zero();
    G(0, 3) = 1.0 / eps;
    G(1, 2) = -1.0 / eps;
    G(2, 1) = 1.0 / eps;
    G(2, 3) = b / (eps * eps);
    G(3, 0) = -1.0 / eps;
    G(3, 2) = -b / (eps * eps);
    G(3, 3) = -bprime / (eps * eps);
    return G;
}

std::function<CMat4(double)> os_jump_field(const Profile& p, const SpectralPoint& pt) {
    Cplx eps = pt.eps();
    double alpha = pt.alpha;
    Cplx c = pt.c;
    return [=, &p](double x) {
        Cplx b = p.u(x) - c + 2.0 * eps * alpha * alpha;
        return jump_matrix(b, p.du(x), eps);
    };
}

std::function<CMat4(double)> os_jump_field_deriv(const Profile& p,
                                                 const SpectralPoint& pt) {
    return [&p](double x) {
        // d/dx of jump_matrix(b, U', eps): b -> U', b' -> U'', eps -> 0.
        return jump_matrix(p.du(x), p.ddu(x), 0.0);
    };
}

Cplx viscous_evans(const OSModeBasis& modes) {
    // L-inf normalized copies of the two decaying modes at z = 0; the
    // exponents vanish there, so factors are the values.
    CVec4 s = modes.s_minus.factor_stack(0.0) / modes.s_minus.sup_abs;
    CVec4 f = modes.f_minus.factor_stack(0.0) / modes.f_minus.sup_abs;
    Cplx mu0 = std::sqrt(modes.pt.alpha * modes.pt.alpha +
                         (modes.profile.u(0.0) - modes.pt.c) / modes.pt.eps());
    return (s[0] * f[1] - f[0] * s[1]) / mu0;
}

namespace {

CMat2 coefficient_matrix(const OSModeBasis& m, Cplx* det_out) {
    CMat2 Phi0, Psi0;
    CVec4 sm = m.s_minus.factor_stack(0.0), fm = m.f_minus.factor_stack(0.0);
    CVec4 sp = m.s_plus.factor_stack(0.0), fp = m.f_plus.factor_stack(0.0);
    Phi0 << sm[0], fm[0], sm[1], fm[1];
    Psi0 << sp[0], fp[0], sp[1], fp[1];
    if (det_out) *det_out = Phi0.determinant();
    return Phi0.inverse() * Psi0;
}

}  // namespace

GreenKernel halfline_green(OSModeBasis modes, const Config& cfg) {
    GreenKernel K;
    K.evans = viscous_evans(modes);
    if (std::abs(K.evans) < 1e-10)
        throw AtEigenvalueError("halfline_green: D(alpha,c) vanishes (at an eigenvalue)");
    K.adjoints = adjoint_basis(modes, os_jump_field(modes.profile, modes.pt),
                               os_jump_field_deriv(modes.profile, modes.pt));
    Cplx det;
    K.M = coefficient_matrix(modes, &det);
    K.modes = std::move(modes);
    return K;
}

GreenKernel halfline_green(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg) {
    return halfline_green(build_os_modes(p, alpha, c, reynolds, cfg), cfg);
}

Cplx GreenKernel::eval(double x, double z, int k, int l) const {
    return eval_branch(x, z, k, l, z >= x);
}

Cplx GreenKernel::eval_branch(double x, double z, int k, int l, bool upper) const {
    // k = x-derivative order, l = z-derivative order.
    if (k + l > 3) throw ParameterError("GreenKernel: k + l <= 3");
    const ModeFunction* dec[2] = {&modes.s_minus, &modes.f_minus};
    const ModeFunction* gro[2] = {&modes.s_plus, &modes.f_plus};
    CMat4 rows = adjoints.rows_at(x);

    // Adjoint row j pairs with mode j; its exponent is -g_j(x). Columns of
    // `rows` are x-derivative orders of the adjoint scalars.
    auto mode_term = [&](const ModeFunction& mz, Cplx gz, int row,
                         const ModeFunction& gx) -> Cplx {
        Cplx expo = gz - gx.log_prefactor(x);
        Cplx fz = mz.factor_stack(z)[l];
        Cplx fx = rows(row, k);
        if (expo.real() < -745.0) return 0.0;
        return std::exp(expo) * fz * fx;
    };

    Cplx sum = 0.0;
    // Common part: sum_{j in dec, m in gro} M_{jm} phi_j(z) Psi*_m(x).
    for (int j = 0; j < 2; ++j) {
        Cplx gz = dec[j]->log_prefactor(z);
        for (int m = 0; m < 2; ++m)
            sum += M(j, m) * mode_term(*dec[j], gz, m + 2, *gro[m]);
    }
    if (upper) {
        for (int j = 0; j < 2; ++j)
            sum += mode_term(*dec[j], dec[j]->log_prefactor(z), j, *dec[j]);
    } else {
        for (int j = 0; j < 2; ++j)
            sum -= mode_term(*gro[j], gro[j]->log_prefactor(z), j + 2, *gro[j]);
    }
    return sum;
}

Cplx GreenKernel::vorticity(double x, double z) const {
    return eval(x, z, 0, 2) - modes.pt.alpha * modes.pt.alpha * eval(x, z, 0, 0);
}

Cplx green_derivatives(const GreenKernel& kernel, double x, double z, int k, int l) {
    return kernel.eval(x, z, k, l);
}

VorticitySplit vorticity_split(const GreenKernel& kernel, const FastScalarPair& pair,
                               double x, double z, double quad_tol) {
    VorticitySplit out;
    out.g_a = airy_kernel(pair, x, z);
    const double z_max = kernel.modes.profile.z_max;
    auto integrand = [&](double y) {
        return airy_kernel(pair, y, z) * kernel.modes.profile.ddu(y) *
               kernel.eval(x, y, 0, 0);
    };
    out.r_g = integrate_gk_split(integrand, 0.0, z_max, {x, z}, quad_tol, 1e-9);
    return out;
}

}  // namespace oswald
