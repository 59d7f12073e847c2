#pragma once

#include <vector>

#include "oswald/gridfun.hpp"
#include "oswald/profile.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Mapped-Chebyshev collocation on [0, z_max]: algebraic map clustering at the
/// wall, differentiation matrices up to fourth order built by the
/// arbitrary-node recursion (exact, no matrix powers).
struct CollocationOperator {
    int N = 256;                 // polynomial degree (N+1 nodes)
    std::vector<double> nodes;   // ascending, nodes[0] = 0
    Eigen::MatrixXd D1, D2, D3, D4;

    Eigen::MatrixXcd delta_alpha(double alpha) const;  // D2 - alpha^2 I
};

CollocationOperator make_collocation(double z_max, int N, double cluster = 8.0);

/// Generalized OS eigenvalues c at (alpha, R) by shift-invert around `shift`;
/// spurious modes filtered by the N -> 5N/4 resolution test.
std::vector<Cplx> collocation_eigs(const Profile& p, double alpha, double reynolds,
                                   int N, Cplx shift = Cplx(0.4, 0.2),
                                   double resolve_tol = 1e-4);

/// Dense resolvent solve (lambda - L_alpha)^-1 f: solves OS(psi) = f/(i alpha)
/// with clamped boundary rows and returns Delta_alpha psi on the nodes.
std::vector<Cplx> resolvent_direct(const Profile& p, double alpha, double reynolds,
                                   Cplx lambda, const ScalarField& f, int N);

/// IMEX (Crank-Nicolson diffusion, AB2 advection + U''-coupling) march of the
/// linearized vorticity equation, monolithic in (omega, psi) so the no-slip
/// conditions sit on the streamfunction rows.
struct TimestepResult {
    std::vector<double> nodes;
    std::vector<Cplx> omega;
};
TimestepResult timestep_evolve(const Profile& p, double alpha, double reynolds,
                               const ScalarField& omega0, double t, int N, double dt,
                               bool heat_test_mode = false);

}  // namespace oswald
