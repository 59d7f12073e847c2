#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "oswald/interp.hpp"
#include "oswald/ode.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Convolution against a separable two-sided kernel on a fixed grid:
///   u(z) = K e^(-shift z) [phi_m(z) A(z) + phi_p(z) B(z)],
///   A(z) = int_0^z phi_p e^(shift x) Wt dx,  B(z) = int_z^end phi_m e^(shift x) Wt dx,
/// with phi_m = e^(gm) fm decaying and phi_p = e^(gp) fp growing carried as
/// renormalized trajectories. Cumulatives run in damped form (every exponent
/// evaluated has nonpositive real part) with per-segment Gauss panels
/// subdivided to the kernel rate; grid segments bound the panel size, so
/// features resolved by the grid are resolved by the quadrature.
struct SepSolveResult {
    std::vector<Cplx> u, du;
};

SepSolveResult separable_solve(const std::vector<double>& grid,
                               const RenormTrajectory& tm, Cplx sigma_m,
                               const RenormTrajectory& tp, Cplx sigma_p,
                               const std::function<Cplx(double)>& Wt, double shift,
                               Cplx K);

/// Trajectory of a pure exponential e^(mu z) as a 2-stack (value, derivative).
RenormTrajectory affine_trajectory(Cplx mu, double z_max);

/// Hermite interpolation closure over (value, derivative) samples.
std::function<Cplx(double)> hermite_fn(std::shared_ptr<const std::vector<double>> grid,
                                       std::shared_ptr<std::vector<Cplx>> v,
                                       std::shared_ptr<std::vector<Cplx>> d);

}  // namespace oswald
