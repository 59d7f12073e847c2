#pragma once

#include "oswald/airy.hpp"
#include "oswald/gridfun.hpp"
#include "oswald/ode.hpp"
#include "oswald/profile.hpp"
#include "oswald/rayleigh.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// One Orr-Sommerfeld mode in renormalized form: the 4-stack of derivative
/// factors s_k(z) = e^(-g(z)) phi^(k)(z) / sigma^k on the trajectory nodes,
/// with the exponent g and rate mu = g' carried in the trajectory. Products
/// phi_j(z) phi*_k(x) are assembled by adding exponents before exponentiating.
struct ModeFunction {
    RenormTrajectory stack;  // dim 4, scaled factors
    Cplx sigma{1.0, 0.0};
    double sup_abs = 1.0;  // sup_z |phi| over the grid (decaying modes)

    Cplx log_prefactor(double z) const { return stack.expo_at(z); }
    /// (phi, phi', phi'', phi''') e^(-g(z)) -- the unscaled factor stack.
    CVec4 factor_stack(double z) const {
        CVec f = stack.eval(z);
        CVec4 out;
        Cplx s = 1.0;
        for (int k = 0; k < 4; ++k) {
            out[k] = f[k] * s;
            s *= sigma;
        }
        return out;
    }
    /// z-derivative of the factor stack (at fixed exponent normalization).
    CVec4 factor_stack_deriv(double z) const {
        CVec d = stack.eval_deriv(z);
        CVec4 out;
        Cplx s = 1.0;
        for (int k = 0; k < 4; ++k) {
            out[k] = d[k] * s;
            s *= sigma;
        }
        return out;
    }
    /// phi^(k)(z) with the exponential applied; overflows for growing modes
    /// at large z, use factor_stack + log_prefactor downstream.
    Cplx full(double z, int k) const {
        return std::exp(log_prefactor(z)) * factor_stack(z)[k];
    }
};

struct IterationReport {
    std::vector<double> error_norms;  // ||E_n||_{eta,2}
    std::vector<double> ratios;
    double gate_value = 0.0;  // alpha m_f^-2 (1 + 1/|E|)
    int iterations = 0;
};

struct FastReport {
    PicardReport minus, plus;
    double sqrt_eps_abs = 0.0;
    double factor_dev_minus = 0.0;  // |Z1(0) - 1| for the minus mode
    double factor_dev_plus = 0.0;   // |Z1(zmax) - 1| for the plus mode
};

/// The four Orr-Sommerfeld modes at one (alpha, c, R) plus build diagnostics.
struct OSModeBasis {
    SpectralPoint pt;
    Profile profile;
    double eta = 0.5;
    std::shared_ptr<const std::vector<double>> grid;

    ModeFunction s_minus, s_plus, f_minus, f_plus;
    RayleighBasis rayleigh;
    FastRates rates;
    IterationReport iter_minus, iter_plus;
    FastReport fast_report;

    /// Slow-mode closeness diagnostics ||psi_s - psi_alpha||_eta per sign.
    double psi_drift_minus = 0.0, psi_drift_plus = 0.0;
};

/// Value + first two derivatives of a residual function E_n sampled on the
/// shared mode grid.
struct ErrorTriplet {
    std::shared_ptr<const std::vector<double>> grid;
    std::vector<Cplx> v, d1, d2;

    double norm_eta2(double eta, double alpha) const;
};

/// Context needed to run one corrector step of the slow-mode iteration.
struct SlowContext {
    Profile profile;
    SpectralPoint pt;
    int sgn = -1;  // -1: decaying slow mode, +1: growing
    double eta = 0.5;
    const RayleighBasis* rayleigh = nullptr;
    const FastScalarPair* pair = nullptr;
    std::shared_ptr<const std::vector<double>> grid;
};

/// E_{n+1} = Iter(E_n): the error left after one Rayleigh + Airy corrector.
ErrorTriplet iter_step(const ErrorTriplet& e, const SlowContext& ctx);

/// Full basis construction: Rayleigh modes, slow modes by the corrector
/// iteration, fast modes by partial diagonalization of the stack system.
OSModeBasis build_os_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg = default_config());

/// Slow pair only (exposed for the contraction-rate tests).
struct SlowModesResult {
    ModeFunction minus, plus;
    IterationReport report_minus, report_plus;
    double drift_minus = 0.0, drift_plus = 0.0;
};
SlowModesResult slow_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const RayleighBasis& basis, const FastScalarPair& pair,
                           const Config& cfg = default_config());

struct FastModesResult {
    ModeFunction minus, plus;
    FastReport report;
};
FastModesResult fast_modes(const Profile& p, double alpha, Cplx c, double reynolds,
                           const Config& cfg = default_config());

/// Row duals of the four mode stacks under the jump-matrix bilinear form:
/// row j of rows(x) is the x-derivative stack (phi*_j, .., d^3 phi*_j)
/// times e^(-g_j(x)), scaled by sigma_j^-k per column k. Row order matches
/// (s-, f-, s+, f+); rows 0..1 are the growing duals of the decaying modes.
struct AdjointBasis {
    std::shared_ptr<const std::vector<double>> grid;
    std::vector<CMat4> rows;
    std::vector<CMat4> rows_deriv;  // dX/dx = -X (B' S + B S') X per node
    double max_condition = 0.0;

    CMat4 rows_at(double x) const;
};

/// Invert the bilinear system B(x) [modes] at every grid point. B_field is
/// the jump-matrix inverse [G]^-1 as a function of x (green::jump_matrix) and
/// B_field_deriv its x-derivative.
AdjointBasis adjoint_basis(const OSModeBasis& modes,
                           const std::function<CMat4(double)>& B_field,
                           const std::function<CMat4(double)>& B_field_deriv = nullptr,
                           double cond_limit = 1e10);

/// Relative Orr-Sommerfeld residual of a mode, evaluated on the conjugated
/// (renormalized) factor with finite differences for the factor derivatives.
double os_residual(const ModeFunction& mode, const Profile& p, const SpectralPoint& pt);

}  // namespace oswald
