#include "oswald/separable.hpp"

#include <algorithm>
#include <cmath>

namespace oswald {

namespace {

// 4-point Gauss-Legendre on [0,1].
const double G4X[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                       0.930568155797026};
const double G4W[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                       0.173927422568727};

Cplx safe_exp(Cplx w) {
    if (w.real() < -745.0) return 0.0;
    return std::exp(w);
}

}  // namespace

// ---------------------------------------------------------------------------
// Separable-kernel solve:  u(z) = K e^(-shift z) [phi_m(z) A(z) + phi_p(z) B(z)]
// with A(z) = int_0^z phi_p e^(shift x) Wt dx, B(z) = int_z^end phi_m e^(shift x) Wt dx,
// phi_m = e^(gm) fm decaying, phi_p = e^(gp) fp growing, gm + gp = 0 pointwise
// in the exponent rate. All cumulatives are carried in damped form, so every
// exponential evaluated has non-positive real part.
// ---------------------------------------------------------------------------

SepSolveResult separable_solve(const std::vector<double>& grid,
                               const RenormTrajectory& tm, Cplx sigma_m,
                               const RenormTrajectory& tp, Cplx sigma_p,
                               const std::function<Cplx(double)>& Wt, double shift,
                               Cplx K) {
    const int n = static_cast<int>(grid.size());
    std::vector<Cplx> Ahat(n, 0.0), Bhat(n, 0.0);

    auto rate_at = [&](double z) {
        return std::abs(tp.mu_at(z)) + std::abs(shift) + 1.0;
    };

    // Forward damped cumulative Ahat(z) = int_0^z e^{gm(z)+gp(x)+shift(x-z)} fp Wt dx.
    for (int i = 1; i < n; ++i) {
        double za = grid[i - 1], zb = grid[i];
        double h = zb - za;
        Cplx gm_b = tm.expo_at(zb);
        Cplx decay = safe_exp(tm.expo_at(zb) - tm.expo_at(za) - shift * h);
        Cplx local = 0.0;
        int sub = std::min(128, std::max(1, static_cast<int>(std::ceil(h * rate_at(0.5 * (za + zb)) / 0.5))));
        for (int s = 0; s < sub; ++s) {
            double xa = za + h * s / sub, xb = za + h * (s + 1) / sub;
            for (int q = 0; q < 4; ++q) {
                double x = xa + (xb - xa) * G4X[q];
                Cplx expo = gm_b + tp.expo_at(x) + shift * (x - zb);
                Cplx w = safe_exp(expo);
                if (w == Cplx(0.0)) continue;
                local += (xb - xa) * G4W[q] * w * tp.eval(x)[0] * Wt(x);
            }
        }
        Ahat[i] = decay * Ahat[i - 1] + local;
    }
    // Backward damped cumulative Bhat(z) = int_z^end e^{gp(z)+gm(x)+shift(x-z)} fm Wt dx.
    for (int i = n - 2; i >= 0; --i) {
        double za = grid[i], zb = grid[i + 1];
        double h = zb - za;
        Cplx gp_a = tp.expo_at(za);
        Cplx decay = safe_exp(tp.expo_at(za) - tp.expo_at(zb) + shift * h);
        Cplx local = 0.0;
        int sub = std::min(128, std::max(1, static_cast<int>(std::ceil(h * rate_at(0.5 * (za + zb)) / 0.5))));
        for (int s = 0; s < sub; ++s) {
            double xa = za + h * s / sub, xb = za + h * (s + 1) / sub;
            for (int q = 0; q < 4; ++q) {
                double x = xa + (xb - xa) * G4X[q];
                Cplx expo = gp_a + tm.expo_at(x) + shift * (x - za);
                Cplx w = safe_exp(expo);
                if (w == Cplx(0.0)) continue;
                local += (xb - xa) * G4W[q] * w * tm.eval(x)[0] * Wt(x);
            }
        }
        Bhat[i] = decay * Bhat[i + 1] + local;
    }

    SepSolveResult out;
    out.u.resize(n);
    out.du.resize(n);
    for (int i = 0; i < n; ++i) {
        CVec fm = tm.eval(grid[i]), fp = tp.eval(grid[i]);
        out.u[i] = K * (fm[0] * Ahat[i] + fp[0] * Bhat[i]);
        out.du[i] = K * ((sigma_m * fm[1] - shift * fm[0]) * Ahat[i] +
                         (sigma_p * fp[1] - shift * fp[0]) * Bhat[i]);
    }
    return out;
}

RenormTrajectory affine_trajectory(Cplx mu, double z_max) {
    RenormTrajectory t;
    t.dim = 2;
    t.nodes = {0.0, z_max};
    CVec v(2);
    v << 1.0, mu;
    t.values = {v, v};
    t.derivs = {CVec::Zero(2), CVec::Zero(2)};
    t.expo = {0.0, mu * z_max};
    t.expo_deriv = {mu, mu};
    return t;
}

// Hermite interpolation closure over (v, d1) samples on a grid.
std::function<Cplx(double)> hermite_fn(std::shared_ptr<const std::vector<double>> grid,
                                       std::shared_ptr<std::vector<Cplx>> v,
                                       std::shared_ptr<std::vector<Cplx>> d) {
    return [grid, v, d](double z) {
        const auto& g = *grid;
        int i = locate_segment(g, z);
        return hermite_eval<Cplx>(z, g[i], g[i + 1], (*v)[i], (*v)[i + 1], (*d)[i],
                                  (*d)[i + 1]);
    };
}


}  // namespace oswald
