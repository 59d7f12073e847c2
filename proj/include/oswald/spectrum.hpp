#pragma once

#include <optional>
#include <vector>

#include "oswald/green.hpp"
#include "oswald/modes.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// A-priori half strip containing every eigenvalue lambda of L_alpha:
/// Re lambda <= -alpha^2 nu + C0 |alpha|, |Im lambda| <= C1 |alpha| with
/// C0 = ||z U'||_L2 and C1 = ||U||_inf + C0.
struct SpectralStrip {
    double alpha = 1.0;
    double nu = 1e-4;
    double C0 = 0.0;
    double C1 = 0.0;
    double re_max = 0.0;
    double im_max = 0.0;

    bool contains(Cplx lambda, double slack = 1e-9) const {
        return lambda.real() <= re_max + slack && std::abs(lambda.imag()) <= im_max + slack;
    }
};

SpectralStrip spectral_strip(const Profile& p, double alpha, double nu);

struct EigenRecord {
    double alpha = 0.0;
    Cplx c;
    Cplx lambda;
    double residual = 0.0;  // |D| at the root
    int winding = 0;        // from the enclosing certificate box
    SampledFunction mode;   // eigenfunction (value + derivative), sup norm 1
    double bc_value = 0.0;  // |phi(0)|
    double bc_slope = 0.0;  // |phi'(0)| / ||phi'||_inf
};

struct ComplexBox {
    double re0, re1, im0, im1;
    Cplx center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
    double diam() const { return std::max(re1 - re0, im1 - im0); }
};

struct FindResult {
    std::vector<EigenRecord> records;
    std::vector<std::string> warnings;
    int total_winding = 0;
};

/// Evans function evaluation D(alpha, c) with a gate-relaxation fallback for
/// points where the conservative slow-mode gate trips but the iteration still
/// contracts (needed near inviscid roots where |E| is small).
Cplx evans_at(const Profile& p, double alpha, Cplx c, double reynolds,
              const Config& cfg = default_config());

/// Argument-principle winding of D around the box boundary (samples per edge
/// adaptively doubled on phase-unwrap ambiguity).
int evans_winding(const Profile& p, double alpha, double reynolds, const ComplexBox& box,
                  int samples = 512, const Config& cfg = default_config());

/// Winding + quadrisection + secant refinement. Emits one EigenRecord per
/// simple root found; warnings record any winding/root-count mismatch.
FindResult find_eigenvalues(const Profile& p, double alpha, double reynolds,
                            const ComplexBox& box, const Config& cfg = default_config());

struct ContinuationError : NumericalGateError {
    double last_good_nu;
    ContinuationError(const std::string& what, double nu)
        : NumericalGateError(what), last_good_nu(nu) {}
    std::string kind() const override { return "continuation-break"; }
};

/// Continue an inviscid instability E(alpha0, c0) = 0 to small viscosity:
/// secant iteration on D(alpha0, .) seeded at the previous root, for each nu
/// in the (decreasing) schedule.
std::vector<std::pair<double, Cplx>> continue_from_inviscid(
    const Profile& p, double alpha0, Cplx c0, const std::vector<double>& nu_schedule,
    const Config& cfg = default_config());

/// Most unstable rate lambda_alpha = -i alpha c over the unstable half-strip
/// image; 0 when no unstable eigenvalue exists.
struct MaxRateResult {
    Cplx lambda;  // 0 if stable
    std::optional<EigenRecord> record;
    std::vector<std::string> warnings;
};
MaxRateResult max_unstable_rate(const Profile& p, double alpha, double reynolds,
                                const Config& cfg = default_config());

/// Secant root of the inviscid Evans function E(alpha, .) from a seed.
Cplx inviscid_root(const Profile& p, double alpha, Cplx seed,
                   const Config& cfg = default_config());

}  // namespace oswald
