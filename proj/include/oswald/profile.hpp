#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oswald/interp.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// A boundary-layer shear profile U(z): U(0) = 0, U -> u_plus exponentially
/// at rate eta0. Immutable after construction; all evaluation is pure.
///
/// u/du/ddu are the primary surface; deriv(k,z) extends to k <= 6 for the
/// corrector algebra in the slow-mode builder (closed forms for built-ins,
/// spline derivatives for tabulated profiles, zero beyond what the data
/// supports).
struct Profile {
    std::string name;
    std::function<double(double)> u, du, ddu;
    std::function<double(int, double)> hi_deriv;  // orders 3..6, may be null
    double u_plus = 1.0;
    double eta0 = 1.0;
    double z_max = 30.0;

    double eval(double z) const { return u(z); }
    double deriv(int k, double z) const;

    /// Sampled range of U over [0, z_max] plus u_plus (2048 uniform samples,
    /// cached on first use is avoided: sampling is cheap and profiles are
    /// value types, so we recompute).
    std::pair<double, double> range() const;
};

/// (U, U', U'') at z. Negative z is a domain error.
struct ProfileTriple {
    double u, du, ddu;
};
ProfileTriple eval_profile(const Profile& p, double z);

/// d_c = dist(c, Range(U) on [0, z_max] union {u_plus}).
double range_distance(const Profile& p, Cplx c);

/// Admissibility gate d_c >= eps0 / (1 + alpha), enforced by every
/// downstream constructor.
bool admissible(const Profile& p, double alpha, Cplx c, double eps0);

inline double default_z_max(double eta0) { return std::max(12.0 / eta0, 30.0); }

// Built-in profiles.
Profile make_exp_profile(double u_plus = 1.0);
Profile make_tanh_profile();
/// U identically zero: the U'' == 0 test profile (Rayleigh modes are exact
/// exponentials, R_G vanishes).
Profile make_zero_profile();
/// Wall-bounded shifted tanh shear layer with an interior inflection point
/// at z0; inviscidly unstable for moderate z0 (verified numerically in the
/// test suite before use).
Profile make_unstable_tanh_profile(double z0 = 1.8, double delta = 0.6);
/// Tabulated profile with cubic-spline derivatives.
Profile make_table_profile(const std::string& name, std::vector<double> z,
                           std::vector<double> u, double u_plus, double eta0);
/// Constant profile U == u_plus everywhere (constant-coefficient test
/// extension; violates U(0)=0 on purpose, test fixtures only).
Profile make_constant_profile(double u_plus);

/// Load from a profile spec JSON file ({"name","kind","u_plus","eta0",...})
/// or return a built-in by name ("exp", "tanh", "zero", "unstable-tanh").
Profile load_profile(const std::string& file_or_name);

}  // namespace oswald
