#include "oswald/oracle.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oswald {

namespace {

// Chebyshev-extrema differentiation matrices (descending nodes cos(j pi/N)),
// trigonometric node differences and exact weight ratios to keep the
// higher-order matrices accurate.
std::vector<Eigen::MatrixXd> chebdif(int N, int maxorder) {
    // Built in extended precision: the higher-order matrices lose ~N^2 digits
    // per order to cancellation at the clustered corners.
    using ld = long double;
    const int n = N + 1;
    std::vector<ld> th(n);
    for (int i = 0; i < n; ++i) th[i] = i * M_PIl / N;
    auto dx = [&](int i, int j) {
        return -2.0L * std::sin(0.5L * (th[i] + th[j])) * std::sin(0.5L * (th[i] - th[j]));
    };
    auto cratio = [&](int i, int j) {
        ld r = ((i + j) % 2 == 0) ? 1.0L : -1.0L;
        ld di = (i == 0 || i == N) ? 2.0L : 1.0L;
        ld dj = (j == 0 || j == N) ? 2.0L : 1.0L;
        return r * di / dj;
    };
    std::vector<std::vector<ld>> P(n, std::vector<ld>(n, 0.0L)), Q;
    for (int i = 0; i < n; ++i) P[i][i] = 1.0L;
    std::vector<Eigen::MatrixXd> D(maxorder + 1, Eigen::MatrixXd::Zero(n, n));
    D[0] = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= maxorder; ++k) {
        Q.assign(n, std::vector<ld>(n, 0.0L));
        for (int i = 0; i < n; ++i) {
            ld rowsum = 0.0L;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                Q[i][j] = static_cast<ld>(k) * (cratio(i, j) * P[i][i] - P[i][j]) / dx(i, j);
                rowsum += Q[i][j];
            }
            Q[i][i] = -rowsum;
        }
        P = Q;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) D[k](i, j) = static_cast<double>(Q[i][j]);
    }
    return D;
}

// Derivative matrices on arbitrary distinct nodes (Welfert's recursion),
// weight products carried in log space.
std::vector<Eigen::MatrixXd> poldif(const std::vector<double>& x, int maxorder) {
    const int n = static_cast<int>(x.size());
    std::vector<double> logc(n, 0.0);
    std::vector<double> sign(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) {
                double d = x[i] - x[j];
                logc[i] += std::log(std::abs(d));
                if (d < 0) sign[i] = -sign[i];
            }
    std::vector<Eigen::MatrixXd> D(maxorder + 1,
                                   Eigen::MatrixXd::Zero(n, n));
    D[0] = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= maxorder; ++k) {
        for (int i = 0; i < n; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double cij = sign[i] * sign[j] * std::exp(logc[i] - logc[j]);
                D[k](i, j) = k * (cij * D[k - 1](i, i) - D[k - 1](i, j)) / (x[i] - x[j]);
                rowsum += D[k](i, j);
            }
            D[k](i, i) = -rowsum;
        }
    }
    return D;
}

}  // namespace

CollocationOperator make_collocation(double z_max, int N, double cluster) {
    CollocationOperator op;
    op.N = N;
    op.nodes.resize(N + 1);
    const double L = cluster;
    const double A = 1.0 + 2.0 * L / z_max;  // xi = (A z - L)/(z + L)
    std::vector<double> xi(N + 1);
    for (int i = 0; i <= N; ++i) {
        xi[i] = std::cos(M_PI * (N - i) / N);  // ascending
        op.nodes[i] = L * (1.0 + xi[i]) / (A - xi[i]);
    }
    op.nodes.front() = 0.0;
    op.nodes.back() = z_max;

    // Spectral differentiation in xi (trig-exact Chebyshev matrices,
    // reordered ascending), then the exact chain rule through the map.
    auto Ddesc = chebdif(N, 4);
    std::vector<Eigen::MatrixXd> Dxi(5, Eigen::MatrixXd(N + 1, N + 1));
    for (int k = 1; k <= 4; ++k)
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) Dxi[k](i, j) = Ddesc[k](N - i, N - j);
    const int n = N + 1;
    Eigen::VectorXd x1(n), x2(n), x3(n), x4(n);
    for (int i = 0; i < n; ++i) {
        double s = op.nodes[i] + L;
        double c0 = L * (A + 1.0);
        x1[i] = c0 / (s * s);
        x2[i] = -2.0 * c0 / (s * s * s);
        x3[i] = 6.0 * c0 / (s * s * s * s);
        x4[i] = -24.0 * c0 / (s * s * s * s * s);
    }
    op.D1 = x1.asDiagonal() * Dxi[1];
    op.D2 = (x1.array().square().matrix()).asDiagonal() * Dxi[2] +
            x2.asDiagonal() * Dxi[1];
    op.D3 = (x1.array().pow(3).matrix()).asDiagonal() * Dxi[3] +
            (3.0 * x1.array() * x2.array()).matrix().asDiagonal() * Dxi[2] +
            x3.asDiagonal() * Dxi[1];
    op.D4 = (x1.array().pow(4).matrix()).asDiagonal() * Dxi[4] +
            (6.0 * x1.array().square() * x2.array()).matrix().asDiagonal() * Dxi[3] +
            (3.0 * x2.array().square() + 4.0 * x1.array() * x3.array())
                .matrix()
                .asDiagonal() *
                Dxi[2] +
            x4.asDiagonal() * Dxi[1];
    return op;
}

Eigen::MatrixXcd CollocationOperator::delta_alpha(double alpha) const {
    Eigen::MatrixXcd M = D2.cast<Cplx>();
    M.diagonal().array() -= alpha * alpha;
    return M;
}

namespace {

struct OSPencil {
    CollocationOperator op;
    Eigen::MatrixXcd A, B;  // A phi = c B phi with boundary rows in A
};

OSPencil os_pencil(const Profile& p, double alpha, double reynolds, int N) {
    OSPencil pc;
    pc.op = make_collocation(p.z_max, N);
    const int n = N + 1;
    Cplx eps = SpectralPoint{alpha, Cplx(0.0), reynolds}.eps();
    Eigen::MatrixXcd DA = pc.op.delta_alpha(alpha);
    Eigen::MatrixXcd DA2 = DA * DA;
    Eigen::VectorXcd U(n), U2(n);
    for (int i = 0; i < n; ++i) {
        U[i] = p.u(pc.op.nodes[i]);
        U2[i] = p.ddu(pc.op.nodes[i]);
    }
    pc.A = U.asDiagonal() * DA - Eigen::MatrixXcd(U2.asDiagonal()) - eps * DA2;
    pc.B = DA;
    // Clamped rows: phi(0) = phi'(0) = 0, phi(zmax) = phi'(zmax) = 0.
    auto clamp_row = [&](int row, bool deriv, int node) {
        pc.A.row(row).setZero();
        pc.B.row(row).setZero();
        if (deriv)
            pc.A.row(row) = pc.op.D1.row(node).cast<Cplx>();
        else
            pc.A(row, node) = 1.0;
    };
    clamp_row(0, false, 0);
    clamp_row(1, true, 0);
    clamp_row(n - 2, true, n - 1);
    clamp_row(n - 1, false, n - 1);
    return pc;
}

std::vector<Cplx> pencil_eigs(const OSPencil& pc, Cplx shift) {
    Eigen::MatrixXcd M = pc.A - shift * pc.B;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::MatrixXcd SI = lu.solve(pc.B);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(SI, /*computeEigenvectors=*/false);
    std::vector<Cplx> cs;
    for (int i = 0; i < SI.rows(); ++i) {
        Cplx th = es.eigenvalues()[i];
        if (std::abs(th) < 1e-8) continue;  // infinite eigenvalues of the pencil
        cs.push_back(shift + 1.0 / th);
    }
    return cs;
}

}  // namespace

std::vector<Cplx> collocation_eigs(const Profile& p, double alpha, double reynolds,
                                   int N, Cplx shift, double resolve_tol) {
    if (N < 128) throw ParameterError("collocation_eigs: N >= 128");
    auto e1 = pencil_eigs(os_pencil(p, alpha, reynolds, N), shift);
    auto e2 = pencil_eigs(os_pencil(p, alpha, reynolds, (5 * N) / 4), shift);
    std::vector<Cplx> resolved;
    for (Cplx c : e1) {
        double best = 1e300;
        for (Cplx d : e2) best = std::min(best, std::abs(c - d));
        if (best < resolve_tol) resolved.push_back(c);
    }
    return resolved;
}

std::vector<Cplx> resolvent_direct(const Profile& p, double alpha, double reynolds,
                                   Cplx lambda, const ScalarField& f, int N) {
    OSPencil pc = os_pencil(p, alpha, reynolds, N);
    Cplx c = I * lambda / alpha;
    const int n = N + 1;
    Eigen::MatrixXcd M = pc.A - c * pc.B;
    Eigen::VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = f.f(pc.op.nodes[i]) / (I * alpha);
    rhs[0] = rhs[1] = rhs[n - 2] = rhs[n - 1] = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::VectorXcd psi = lu.solve(rhs);
    double resid = (M * psi - rhs).norm();
    if (!psi.allFinite() || resid > 1e-6 * rhs.norm() * (1.0 + psi.norm()))
        throw AtEigenvalueError("resolvent_direct: lambda is (numerically) an eigenvalue");
    Eigen::VectorXcd theta = pc.op.delta_alpha(alpha) * psi;
    return {theta.data(), theta.data() + n};
}

TimestepResult timestep_evolve(const Profile& p, double alpha, double reynolds,
                               const ScalarField& omega0, double t, int N, double dt,
                               bool heat_test_mode) {
    const double nu = 1.0 / reynolds;
    CollocationOperator op = make_collocation(p.z_max, N);
    const int n = N + 1;
    const auto& z = op.nodes;

    double umax = 0.0;
    for (int i = 0; i < n; ++i) umax = std::max(umax, std::abs(p.u(z[i])));
    // trapezoidal in time: the gate guards accuracy, not hard stability
    if (!heat_test_mode && dt * alpha * umax > 0.8)
        throw NumericalGateError("timestep_evolve: dt too large for the advection scale");

    Eigen::MatrixXcd DA = op.delta_alpha(alpha);
    // Unknowns [omega; psi], fully implicit (the system is linear and the
    // factorization is reused; lagging the U''-coupling destabilizes the
    // wall-vorticity closure).
    Eigen::VectorXcd adv_u(n), adv_c(n);
    for (int i = 0; i < n; ++i) {
        adv_u[i] = -I * alpha * p.u(op.nodes[i]);
        adv_c[i] = heat_test_mode ? Cplx(0.0) : I * alpha * p.ddu(op.nodes[i]);
    }
    Eigen::MatrixXcd Lw = nu * DA;
    Lw += Eigen::MatrixXcd(adv_u.asDiagonal());
    // BDF2 march (BDF1 first step): L-stable, so the algebraic wall-vorticity
    // variable (omega(0) free, pinned through the psi'(0) = 0 row) does not
    // pick up the trapezoidal +-oscillation.
    const int steps = std::max(1, static_cast<int>(std::lround(t / dt)));
    const double h = t / steps;

    auto build_lhs = [&](double bdf_c) {
        Eigen::MatrixXcd LHS = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
        for (int i = 1; i < n - 1; ++i) {
            LHS.row(i).head(n) = -h * Lw.row(i);
            LHS(i, i) += bdf_c;
            LHS(i, n + i) = -h * adv_c[i];
        }
        for (int i = 1; i < n - 1; ++i) {
            LHS.row(n + i).segment(n, n) = DA.row(i);
            LHS(n + i, i) = -1.0;
        }
        if (!heat_test_mode) {
            LHS(0, n) = 1.0;                                      // psi(0) = 0
            LHS.row(n).segment(n, n) = op.D1.row(0).cast<Cplx>();  // psi'(0) = 0
            LHS(n + n - 1, 2 * n - 1) = 1.0;                      // psi(zmax) = 0
            LHS(n - 1, n - 1) = 1.0;                              // omega(zmax) = 0
        } else {
            LHS(0, 0) = 1.0;
            LHS(n - 1, n - 1) = 1.0;
            for (int i : {n, 2 * n - 1}) LHS(i, i) = 1.0;
        }
        return LHS;
    };
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu1(build_lhs(1.0));
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu2(build_lhs(1.5));

    Eigen::VectorXcd omega(n), omega_prev(n);
    for (int i = 0; i < n; ++i) omega[i] = omega0.f(z[i]);

    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * n);
        if (s == 0) {
            for (int i = 1; i < n - 1; ++i) rhs[i] = omega[i];
            omega_prev = omega;
            Eigen::VectorXcd sol = lu1.solve(rhs);
            omega = sol.head(n);
        } else {
            for (int i = 1; i < n - 1; ++i)
                rhs[i] = 2.0 * omega[i] - 0.5 * omega_prev[i];
            omega_prev = omega;
            Eigen::VectorXcd sol = lu2.solve(rhs);
            omega = sol.head(n);
        }
    }

    TimestepResult out;
    out.nodes = z;
    out.omega.assign(omega.data(), omega.data() + n);
    return out;
}

}  // namespace oswald
