#include "oswald/ode.hpp"

#include <algorithm>
#include <cmath>

namespace oswald {

double WeightedNorm::value(const std::vector<double>& grid,
                           const std::vector<Cplx>& f) const {
    double m = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
        m = std::max(m, std::abs(f[i]) * std::exp(eta * grid[i]));
    return m;
}

double WeightedNorm::value2(const std::vector<double>& grid, const std::vector<Cplx>& f,
                            const std::vector<Cplx>& df,
                            const std::vector<Cplx>& d2f) const {
    double a = std::max(alpha, 1e-30);
    return value(grid, f) + value(grid, df) / a + value(grid, d2f) / (a * a);
}

namespace {

int traj_segment(const std::vector<double>& nodes, double z) {
    return locate_segment(nodes, z);
}

}  // namespace

CVec RenormTrajectory::eval(double z) const {
    int i = traj_segment(nodes, z);
    return hermite_eval<CVec>(z, nodes[i], nodes[i + 1], values[i], values[i + 1],
                              derivs[i], derivs[i + 1]);
}

CVec RenormTrajectory::eval_deriv(double z) const {
    int i = traj_segment(nodes, z);
    return hermite_eval_deriv<CVec>(z, nodes[i], nodes[i + 1], values[i],
                                    values[i + 1], derivs[i], derivs[i + 1]);
}

Cplx RenormTrajectory::expo_at(double z) const {
    int i = traj_segment(nodes, z);
    return hermite_eval<Cplx>(z, nodes[i], nodes[i + 1], expo[i], expo[i + 1],
                              expo_deriv[i], expo_deriv[i + 1]);
}

Cplx RenormTrajectory::mu_at(double z) const {
    int i = traj_segment(nodes, z);
    return hermite_eval<Cplx>(z, nodes[i], nodes[i + 1], expo_deriv[i],
                              expo_deriv[i + 1],
                              (expo_deriv[i + 1] - expo_deriv[i]) / (nodes[i + 1] - nodes[i]),
                              (expo_deriv[i + 1] - expo_deriv[i]) / (nodes[i + 1] - nodes[i]));
}

double RenormTrajectory::sup_factor() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

void RenormTrajectory::anchor_exponent(double z_ref) {
    Cplx off = expo_at(z_ref);
    for (auto& e : expo) e -= off;
}

namespace {

// Dormand-Prince 5(4) tableau.
const double A21 = 1.0 / 5;
const double A31 = 3.0 / 40, A32 = 9.0 / 40;
const double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
const double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
             A54 = -212.0 / 729;
const double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
             A64 = 49.0 / 176, A65 = -5103.0 / 18656;
const double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
             B5 = -2187.0 / 6784, B6 = 11.0 / 84;
const double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
             E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
const double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

// 5-point Gauss-Legendre on [0,1] for the per-step exponent increment.
const double GX[5] = {0.046910077030668, 0.230765344947158, 0.5,
                      0.769234655052841, 0.953089922969332};
const double GW[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                      0.239314335249683, 0.118463442528095};

}  // namespace

RenormTrajectory integrate_renormalized(const std::function<CMat(double)>& A,
                                        const std::function<Cplx(double)>& mu_guide,
                                        Direction direction, const CVec& init,
                                        std::pair<double, double> interval,
                                        const IntegrateOptions& opts) {
    return integrate_renormalized_inplace(
        [&A](double z, CMat& out) { out = A(z); }, mu_guide, direction, init, interval,
        opts);
}

RenormTrajectory integrate_renormalized_inplace(
    const std::function<void(double, CMat&)>& A_inplace,
    const std::function<Cplx(double)>& mu_guide, Direction direction, const CVec& init,
    std::pair<double, double> interval, const IntegrateOptions& opts) {
    const double z_lo = interval.first, z_hi = interval.second;
    const double span = z_hi - z_lo;
    if (span <= 0.0) throw ParameterError("integrate_renormalized: empty interval");
    const bool fwd = (direction == Direction::forward);
    double z = fwd ? z_lo : z_hi;
    const double z_stop = fwd ? z_hi : z_lo;
    const double dir = fwd ? 1.0 : -1.0;
    const int d = static_cast<int>(init.size());

    CMat Aw(d, d);
    CVec ytmp(d);
    auto rhs = [&](double zz, const CVec& y, CVec& out) {
        A_inplace(zz, Aw);
        out.noalias() = Aw * y;
        out -= mu_guide(zz) * y;
    };

    RenormTrajectory tr;
    tr.dim = d;
    CVec y = init;
    CVec k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), y5(d), errv(d);
    rhs(z, y, k1);
    Cplx ex = 0.0;
    tr.nodes.push_back(z);
    tr.values.push_back(y);
    tr.derivs.push_back(k1);
    tr.expo.push_back(ex);
    tr.expo_deriv.push_back(mu_guide(z));

    double h = std::min(opts.h_init, span);
    if (opts.max_step) h = std::min(h, opts.max_step(z));
    const double h_floor = opts.underflow_rel * span;

    while (dir * (z_stop - z) > 1e-14 * span) {
        h = std::min(h, dir * (z_stop - z));
        if (opts.h_dense > 0) h = std::min(h, opts.h_dense);
        if (opts.max_step) h = std::min(h, std::max(1e-14, opts.max_step(z)));
        if (h < h_floor)
            throw StiffnessError("integrate_renormalized: step underflow", z);
        double hs = dir * h;

        ytmp = y + hs * (A21 * k1);
        rhs(z + C2 * hs, ytmp, k2);
        ytmp = y + hs * (A31 * k1 + A32 * k2);
        rhs(z + C3 * hs, ytmp, k3);
        ytmp = y + hs * (A41 * k1 + A42 * k2 + A43 * k3);
        rhs(z + C4 * hs, ytmp, k4);
        ytmp = y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
        rhs(z + C5 * hs, ytmp, k5);
        ytmp = y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
        rhs(z + hs, ytmp, k6);
        y5 = y + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        rhs(z + hs, y5, k7);
        errv = hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double err = 0.0;
        for (int i = 0; i < d; ++i) {
            double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(errv[i]) / sc);
        }

        if (err <= 1.0) {
            Cplx dex = 0.0;
            for (int g = 0; g < 5; ++g) dex += GW[g] * mu_guide(z + hs * GX[g]);
            ex += hs * dex;
            z += hs;
            y = y5;
            k1 = k7;  // FSAL
            tr.nodes.push_back(z);
            tr.values.push_back(y);
            tr.derivs.push_back(k1);
            tr.expo.push_back(ex);
            tr.expo_deriv.push_back(mu_guide(z));
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }

    if (!fwd) {
        std::reverse(tr.nodes.begin(), tr.nodes.end());
        std::reverse(tr.values.begin(), tr.values.end());
        std::reverse(tr.derivs.begin(), tr.derivs.end());
        std::reverse(tr.expo.begin(), tr.expo.end());
        std::reverse(tr.expo_deriv.begin(), tr.expo_deriv.end());
    }
    // Anchor the exponent at the left end of the covered range.
    Cplx off = tr.expo.front();
    for (auto& e : tr.expo) e -= off;
    return tr;
}

// ---------------------------------------------------------------------------
// Duhamel fixed point with translation kernel
// ---------------------------------------------------------------------------

namespace {

// 4-point Gauss-Legendre on [0,1].
const double G4X[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                       0.930568155797026};
const double G4W[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                       0.173927422568727};

struct SweepContext {
    std::vector<double> grid;
    std::function<CMat(double)> K;     // translation kernel K(s)
    std::function<CMat(double)> pert;  // Delta A(y)
    bool anchor_at_end;
};

// One sweep of the linear part: I(z_i) = int_{anchor}^{z_i} K(z_i - y) pert(y) V(y) dy,
// computed by the kernel semigroup recurrence, with V interpolated linearly in
// between grid nodes (the grid is fine; panels use 4-pt GL).
std::vector<CVec> linear_sweep(const SweepContext& ctx, const std::vector<CVec>& V) {
    const auto& g = ctx.grid;
    const int n = static_cast<int>(g.size());
    const int d = static_cast<int>(V[0].size());
    std::vector<CVec> I(n, CVec::Zero(d));

    auto v_at = [&](int seg, double y) -> CVec {
        double t = (y - g[seg]) / (g[seg + 1] - g[seg]);
        return (1.0 - t) * V[seg] + t * V[seg + 1];
    };

    if (ctx.anchor_at_end) {
        // I(z_i) = K(z_i - z_{i+1}) I(z_{i+1}) + int_{z_i}^{z_{i+1}} K(z_i - y) ...
        for (int i = n - 2; i >= 0; --i) {
            double h = g[i + 1] - g[i];
            CVec local = CVec::Zero(d);
            for (int q = 0; q < 4; ++q) {
                double y = g[i] + h * G4X[q];
                local += (h * G4W[q]) * (ctx.K(g[i] - y) * (ctx.pert(y) * v_at(i, y)));
            }
            I[i] = ctx.K(g[i] - g[i + 1]) * I[i + 1] + local;
        }
    } else {
        for (int i = 1; i < n; ++i) {
            double h = g[i] - g[i - 1];
            CVec local = CVec::Zero(d);
            for (int q = 0; q < 4; ++q) {
                double y = g[i - 1] + h * G4X[q];
                local += (h * G4W[q]) * (ctx.K(g[i] - y) * (ctx.pert(y) * v_at(i - 1, y)));
            }
            I[i] = ctx.K(g[i] - g[i - 1]) * I[i - 1] + local;
        }
    }
    return I;
}

std::vector<double> make_tail_grid(double a, double b, int per_unit) {
    int n = std::max(8, static_cast<int>(std::ceil((b - a) * per_unit)));
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = a + (b - a) * i / n;
    return g;
}

double grid_norm(const WeightedNorm& norm, const std::vector<double>& g,
                 const std::vector<CVec>& V) {
    double m = 0.0;
    for (size_t i = 0; i < g.size(); ++i)
        m = std::max(m, V[i].cwiseAbs().maxCoeff() * std::exp(norm.eta * g[i]));
    return m;
}

}  // namespace

TailFunction duhamel_fixed_point(const std::function<CMat(double)>& kernel_translation,
                                 const std::function<CMat(double)>& pert,
                                 const std::function<CVec(double)>& forcing,
                                 const WeightedNorm& norm, double tail_start,
                                 double z_end, bool anchor_at_end, PicardReport* report,
                                 double tol, int max_iter, double no_contraction_gate,
                                 int grid_per_unit) {
    SweepContext ctx;
    ctx.grid = make_tail_grid(tail_start, z_end, grid_per_unit);
    ctx.K = kernel_translation;
    ctx.pert = pert;
    ctx.anchor_at_end = anchor_at_end;
    const int n = static_cast<int>(ctx.grid.size());

    std::vector<CVec> F(n);
    for (int i = 0; i < n; ++i) F[i] = forcing(ctx.grid[i]);
    std::vector<CVec> V = F;

    PicardReport rep;
    double prev_corr = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<CVec> I = linear_sweep(ctx, V);
        std::vector<CVec> Vn(n), diff(n);
        for (int i = 0; i < n; ++i) {
            Vn[i] = F[i] + I[i];
            diff[i] = Vn[i] - V[i];
        }
        double corr = grid_norm(norm, ctx.grid, diff);
        rep.correction_norms.push_back(corr);
        if (prev_corr > 0.0) {
            double ratio = corr / prev_corr;
            rep.ratios.push_back(ratio);
            rep.final_factor = ratio;
            if (ratio >= no_contraction_gate && corr > tol)
                throw ContractionError("duhamel_fixed_point: no contraction", ratio);
        }
        prev_corr = corr;
        V = std::move(Vn);
        rep.iterations = it + 1;
        if (corr < tol) {
            if (report) *report = rep;
            return {ctx.grid, V};
        }
    }
    throw IterationBudgetError("duhamel_fixed_point: iteration budget exhausted");
}

double duhamel_contraction_estimate(const std::function<CMat(double)>& kernel_translation,
                                    const std::function<CMat(double)>& pert,
                                    const WeightedNorm& norm, double tail_start,
                                    double z_end, bool anchor_at_end, int grid_per_unit) {
    SweepContext ctx;
    ctx.grid = make_tail_grid(tail_start, z_end, grid_per_unit);
    ctx.K = kernel_translation;
    ctx.pert = pert;
    ctx.anchor_at_end = anchor_at_end;
    const int n = static_cast<int>(ctx.grid.size());
    int d = static_cast<int>(pert(tail_start).rows());
    // Decaying probe of unit weighted norm.
    std::vector<CVec> probe(n);
    for (int i = 0; i < n; ++i)
        probe[i] = std::exp(-norm.eta * ctx.grid[i]) * CVec::Ones(d);
    auto I = linear_sweep(ctx, probe);
    return grid_norm(norm, ctx.grid, I);
}

}  // namespace oswald
