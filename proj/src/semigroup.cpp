#include "oswald/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "oswald/parallel.hpp"
#include "oswald/quadrature.hpp"

namespace oswald {

double Contour::max_endpoint_gap() const {
    double g = 0.0;
    for (size_t i = 0; i + 1 < pieces.size(); ++i)
        g = std::max(g, std::abs(pieces[i].end - pieces[i + 1].start));
    return g;
}

std::vector<std::pair<Cplx, Cplx>> Contour::all_nodes() const {
    std::vector<std::pair<Cplx, Cplx>> out;
    for (const auto& pc : pieces)
        for (size_t i = 0; i < pc.nodes.size(); ++i)
            out.emplace_back(pc.nodes[i], pc.weights[i]);
    return out;
}

bool in_exclusion_strip(const Profile& p, double alpha, double nu, double x, double z,
                        Cplx lambda, double tol) {
    if (lambda.real() > -alpha * alpha * nu + tol) return false;
    double lo = std::min(x, z), hi = std::max(x, z);
    double umin = 1e300, umax = -1e300;
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
        double u = p.u(lo + (hi - lo) * i / n);
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }
    double c = -lambda.imag() / alpha;
    return c >= umin - tol && c <= umax + tol;
}

namespace {

ContourPiece make_piece(PieceKind kind, const std::function<Cplx(double)>& path,
                        const std::function<Cplx(double)>& dpath, double k0, double k1,
                        int n) {
    ContourPiece pc;
    pc.kind = kind;
    pc.start = path(k0);
    pc.end = path(k1);
    if (std::abs(k1 - k0) < 1e-300) return pc;  // degenerate piece kept for shape
    std::vector<double> xs, ws;
    gauss_legendre_ab(n, k0, k1, xs, ws);
    for (int i = 0; i < n; ++i) {
        pc.nodes.push_back(path(xs[i]));
        pc.weights.push_back(ws[i] * dpath(xs[i]));
    }
    return pc;
}

Contour build_contour_range(double umin, double umax, double alpha, double nu, double t,
                            double a, double theta0, int npp) {
    if (t <= 0.0) throw ParameterError("build_contour: t must be positive");
    Contour ct;
    ct.alpha = alpha;
    ct.nu = nu;
    ct.t = t;
    ct.a = a;
    ct.small_a_case = (a * a * nu <= theta0);
    ct.gamma = ct.small_a_case ? theta0 + 0.5 * alpha * alpha * nu
                               : a * a * nu + 0.5 * alpha * alpha * nu;
    const double gamma = ct.gamma;

    // Truncate arms where e^(Re lambda t) drops 1e-16 below the gamma level.
    double kmax2 = (37.0 / t + a * a * nu - 0.5 * alpha * alpha * nu - gamma) / nu;
    double kmax = std::sqrt(std::max(kmax2, 1.0));

    auto parab = [&](double uref) {
        return [=](double k) {
            return Cplx((a * a - k * k - 0.5 * alpha * alpha) * nu, -alpha * uref + 2.0 * nu * a * k);
        };
    };
    auto dparab = [=](double k) { return Cplx(-2.0 * k * nu, 2.0 * nu * a); };

    // Arm segmentation: dense near the tip (Gaussian scale 1/sqrt(nu t)).
    double s1 = std::min(kmax, 1.0 / std::sqrt(nu * t));
    std::vector<std::pair<double, double>> segs;
    if (s1 < kmax) {
        segs = {{0.0, s1}, {s1, std::min(2.5 * s1, kmax)}, {std::min(2.5 * s1, kmax), kmax}};
    } else {
        segs = {{0.0, kmax}};
    }

    // Down arm at Im = -alpha umax, k from -kmax to 0.
    for (auto it = segs.rbegin(); it != segs.rend(); ++it)
        ct.pieces.push_back(make_piece(PieceKind::parabolic_down, parab(umax), dparab,
                                       -it->second, -it->first, npp));
    double tip_re = (a * a - 0.5 * alpha * alpha) * nu;
    double g_re = gamma - alpha * alpha * nu;
    if (ct.small_a_case) {
        auto shift5 = [=](double q) { return Cplx(q, -alpha * umax); };
        auto dshift = [](double) { return Cplx(1.0, 0.0); };
        ct.pieces.push_back(make_piece(PieceKind::horizontal_shift, shift5, dshift,
                                       tip_re, g_re, npp));
    }
    // Vertical piece at Re = gamma - alpha^2 nu, Im from -alpha umax up to -alpha umin.
    {
        auto vert = [=](double s) { return Cplx(g_re, s); };
        auto dvert = [](double) { return Cplx(0.0, 1.0); };
        ct.pieces.push_back(make_piece(PieceKind::vertical, vert, dvert, -alpha * umax,
                                       -alpha * umin, npp * 2));
    }
    if (ct.small_a_case) {
        auto shift4 = [=](double q) { return Cplx(q, -alpha * umin); };
        auto dshift = [](double) { return Cplx(1.0, 0.0); };
        ct.pieces.push_back(make_piece(PieceKind::horizontal_shift, shift4, dshift,
                                       g_re, tip_re, npp));
    }
    // Up arm at Im = -alpha umin, k from 0 to kmax.
    for (auto& s : segs)
        ct.pieces.push_back(make_piece(PieceKind::parabolic_up, parab(umin), dparab,
                                       s.first, s.second, npp));
    return ct;
}

}  // namespace

Contour build_contour(const Profile& p, double alpha, double nu, double t, double x,
                      double z, double theta0, int nodes_per_piece) {
    double lo = std::min(x, z), hi = std::max(x, z);
    double umin = 1e300, umax = -1e300;
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
        double u = p.u(lo + (hi - lo) * i / n);
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }
    double a = std::abs(x - z) / (2.0 * nu * t);
    return build_contour_range(umin, umax, alpha, nu, t, a, theta0, nodes_per_piece);
}

Contour build_contour_global(const Profile& p, double alpha, double nu, double t,
                             double a, double theta0, int nodes_per_piece) {
    auto [lo, hi] = p.range();
    return build_contour_range(lo, hi, alpha, nu, t, a, theta0, nodes_per_piece);
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

SemigroupEvaluator::SemigroupEvaluator(Profile p, double alpha, double reynolds,
                                       SemigroupOptions opt, Config cfg)
    : p_(std::move(p)), alpha_(alpha), reynolds_(reynolds), opt_(opt), cfg_(cfg) {
    if (opt_.lambda0_real) {
        lambda0_ = *opt_.lambda0_real;
    } else if (opt_.with_r_part) {
        MaxRateResult mr = max_unstable_rate(p_, alpha_, reynolds_, cfg_);
        lambda0_ = mr.lambda.real();
    }
}

void SemigroupEvaluator::prepare(double t_min) {
    if (prepared_tmin_ > 0.0 && prepared_tmin_ <= t_min) return;
    prepared_tmin_ = t_min;
    double nu = 1.0 / reynolds_;
    double fs = 1.0 / std::sqrt(nu * std::max(t_min, 1e-4)) + alpha_;
    grid_ = layer_grid(p_.z_max, fs, 0.08);

    rnodes_.clear();
    if (!opt_.with_r_part) return;
    double gamma = lambda0_ + opt_.tau + opt_.gamma_shift;
    double umax = 0.0;
    for (int i = 0; i <= 1024; ++i)
        umax = std::max(umax, std::abs(p_.u(p_.z_max * i / 1024.0)));
    double M = std::ceil(1.0 + umax);
    // Vertical segment [gamma - i alpha M, gamma + i alpha M], upward.
    std::vector<double> xs, ws;
    gauss_legendre_ab(opt_.r_nodes_vertical, -alpha_ * M, alpha_ * M, xs, ws);
    std::vector<std::pair<Cplx, Cplx>> nodes;
    for (size_t i = 0; i < xs.size(); ++i)
        nodes.emplace_back(Cplx(gamma, xs[i]), Cplx(0, 1) * ws[i]);
    // Rays gamma - k +/- i alpha M: bottom ray incoming (+dk), top outgoing (-dk).
    double kmax = 37.0 / t_min;
    std::vector<double> edges{0.0, 0.5, 2.0, 8.0};
    while (edges.back() < kmax) edges.push_back(edges.back() * 4.0);
    edges.back() = kmax;
    for (size_t s = 0; s + 1 < edges.size(); ++s) {
        gauss_legendre_ab(opt_.r_nodes_arm, edges[s], edges[s + 1], xs, ws);
        for (size_t i = 0; i < xs.size(); ++i) {
            nodes.emplace_back(Cplx(gamma - xs[i], alpha_ * M), Cplx(-ws[i], 0));
            nodes.emplace_back(Cplx(gamma - xs[i], -alpha_ * M), Cplx(ws[i], 0));
        }
    }

    rnodes_.resize(nodes.size());
    try {
        parallel_for(static_cast<int>(nodes.size()), [&](int i) {
            RNode rn;
            rn.lambda = nodes[i].first;
            rn.weight = nodes[i].second;
            Cplx c = I * rn.lambda / alpha_;
            rn.kernel = std::make_shared<GreenKernel>(
                halfline_green(p_, alpha_, c, reynolds_, cfg_));
            rn.pair = std::make_shared<FastScalarPair>(
                airy_pair(p_, alpha_, c, reynolds_, cfg_));
            rnodes_[i] = std::move(rn);
        });
    } catch (const AtEigenvalueError&) {
        throw ContourConflictError(
            "semigroup: R-contour passes through an eigenvalue; shift gamma by tau");
    }
}

namespace {

// u(y) = int_0^zmax G(x, y) w(x) dx via the separable mode/adjoint structure:
// O(N) damped cumulative sweeps per mode.
std::vector<Cplx> green_convolve(const GreenKernel& K,
                                 const std::vector<double>& grid,
                                 const std::function<Cplx(double)>& w) {
    const int n = static_cast<int>(grid.size());
    const ModeFunction* dec[2] = {&K.modes.s_minus, &K.modes.f_minus};
    const ModeFunction* gro[2] = {&K.modes.s_plus, &K.modes.f_plus};

    // Panel integrals of e^{theta(x)} row_m(x) w(x) use 4-pt GL with
    // subdivision matched to the fast rate.
    static const double GX[4] = {0.069431844202974, 0.330009478207572,
                                 0.669990521792428, 0.930568155797026};
    static const double GW[4] = {0.173927422568727, 0.326072577431273,
                                 0.326072577431273, 0.173927422568727};

    auto rate = [&](double x) {
        return std::abs(K.modes.f_minus.stack.mu_at(x)) + 1.0;
    };

    // Mode-m constants A_m = int e^{-g_m} rows(m+2, 0) w dx (damped against
    // nothing: exponent -g_gro <= 0).
    Cplx A[2] = {0.0, 0.0};
    auto rows_interp = [&](double x) { return K.adjoints.rows_at(x); };

    for (int m = 0; m < 2; ++m) {
        Cplx acc = 0.0;
        for (int i = 1; i < n; ++i) {
            double xa = grid[i - 1], xb = grid[i];
            int sub = std::min(48, std::max(1, static_cast<int>(
                                                   std::ceil((xb - xa) * rate(0.5 * (xa + xb)) / 1.2))));
            for (int s = 0; s < sub; ++s) {
                double a0 = xa + (xb - xa) * s / sub, b0 = xa + (xb - xa) * (s + 1) / sub;
                for (int q = 0; q < 4; ++q) {
                    double x = a0 + (b0 - a0) * GX[q];
                    Cplx ex = -gro[m]->log_prefactor(x);
                    if (ex.real() < -745.0) continue;
                    acc += (b0 - a0) * GW[q] * std::exp(ex) * rows_interp(x)(m + 2, 0) * w(x);
                }
            }
        }
        A[m] = acc;
    }

    // Branch cumulative sweeps.
    std::vector<Cplx> B0(n, 0.0), B1(n, 0.0);  // dec modes, int_0^y
    std::vector<Cplx> C0(n, 0.0), C1(n, 0.0);  // gro modes, int_y^zmax
    for (int j = 0; j < 2; ++j) {
        std::vector<Cplx>& B = (j == 0) ? B0 : B1;
        const ModeFunction* md = dec[j];
        for (int i = 1; i < n; ++i) {
            double xa = grid[i - 1], xb = grid[i];
            Cplx carry = md->log_prefactor(xb) - md->log_prefactor(xa);
            Cplx dec_f = carry.real() < -745.0 ? Cplx(0) : std::exp(carry);
            Cplx local = 0.0;
            int sub = std::min(48, std::max(1, static_cast<int>(
                                                   std::ceil((xb - xa) * rate(0.5 * (xa + xb)) / 1.2))));
            for (int s = 0; s < sub; ++s) {
                double a0 = xa + (xb - xa) * s / sub, b0 = xa + (xb - xa) * (s + 1) / sub;
                for (int q = 0; q < 4; ++q) {
                    double x = a0 + (b0 - a0) * GX[q];
                    Cplx ex = md->log_prefactor(xb) - md->log_prefactor(x);
                    if (ex.real() < -745.0) continue;
                    local += (b0 - a0) * GW[q] * std::exp(ex) * rows_interp(x)(j, 0) * w(x);
                }
            }
            B[i] = dec_f * B[i - 1] + local;
        }
    }
    for (int j = 0; j < 2; ++j) {
        std::vector<Cplx>& C = (j == 0) ? C0 : C1;
        const ModeFunction* mg = gro[j];
        for (int i = n - 2; i >= 0; --i) {
            double xa = grid[i], xb = grid[i + 1];
            Cplx carry = mg->log_prefactor(xa) - mg->log_prefactor(xb);
            Cplx dec_f = carry.real() < -745.0 ? Cplx(0) : std::exp(carry);
            Cplx local = 0.0;
            int sub = std::min(48, std::max(1, static_cast<int>(
                                                   std::ceil((xb - xa) * rate(0.5 * (xa + xb)) / 1.2))));
            for (int s = 0; s < sub; ++s) {
                double a0 = xa + (xb - xa) * s / sub, b0 = xa + (xb - xa) * (s + 1) / sub;
                for (int q = 0; q < 4; ++q) {
                    double x = a0 + (b0 - a0) * GX[q];
                    Cplx ex = mg->log_prefactor(xa) - mg->log_prefactor(x);
                    if (ex.real() < -745.0) continue;
                    local += (b0 - a0) * GW[q] * std::exp(ex) * rows_interp(x)(j + 2, 0) * w(x);
                }
            }
            C[i] = dec_f * C[i + 1] + local;
        }
    }

    std::vector<Cplx> u(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double y = grid[i];
        Cplx fs = dec[0]->factor_stack(y)[0], ff = dec[1]->factor_stack(y)[0];
        Cplx gs = gro[0]->factor_stack(y)[0], gf = gro[1]->factor_stack(y)[0];
        Cplx gdec_s = dec[0]->log_prefactor(y), gdec_f = dec[1]->log_prefactor(y);
        Cplx ggro_s = gro[0]->log_prefactor(y), ggro_f = gro[1]->log_prefactor(y);
        // Common rank-4 part: sum_j phi_j(y) sum_m M_jm A_m.
        Cplx common = 0.0;
        Cplx coef_s = K.M(0, 0) * A[0] + K.M(0, 1) * A[1];
        Cplx coef_f = K.M(1, 0) * A[0] + K.M(1, 1) * A[1];
        if (gdec_s.real() > -745.0) common += std::exp(gdec_s) * fs * coef_s;
        if (gdec_f.real() > -745.0) common += std::exp(gdec_f) * ff * coef_f;
        // x < y branch: + sum_dec phi_j(y) e^{-g_j(x)}-cumulative.
        Cplx branch = fs * B0[i] + ff * B1[i];
        // x > y branch: - sum_gro.
        branch -= gs * C0[i] + gf * C1[i];
        (void)ggro_s;
        (void)ggro_f;
        u[i] = common + branch;
    }
    return u;
}

}  // namespace

std::vector<Cplx> SemigroupEvaluator::s_part(double t, const ScalarField& omega) const {
    const auto& grid = *grid_;
    const int n = static_cast<int>(grid.size());
    double nu = 1.0 / reynolds_;

    // x-window: beyond it every contour integrand is below 1e-16.
    double window = 14.0 * std::sqrt(nu * t) + 45.0 * std::sqrt(nu / opt_.theta0);
    window = std::min(window, p_.z_max);

    // Log-spaced |x-z| buckets sharing one contour each.
    int nb = opt_.a_buckets;
    std::vector<double> edges(nb + 1);
    double dmin = std::max(window / 4096.0, 1e-9);
    for (int b = 0; b <= nb; ++b)
        edges[b] = dmin * std::pow(window / dmin, static_cast<double>(b) / nb);
    edges[0] = 0.0;

    // Contours + pair caches per bucket.
    struct Bucket {
        Contour ct;
        std::vector<std::pair<Cplx, Cplx>> nodes;
        std::vector<std::shared_ptr<FastScalarPair>> pairs;
    };
    std::vector<Bucket> buckets(nb);
    for (int b = 0; b < nb; ++b) {
        double amid = std::sqrt(std::max(edges[b], dmin) * edges[b + 1]) / (2.0 * nu * t);
        buckets[b].ct = build_contour_global(p_, alpha_, nu, t, amid, opt_.theta0,
                                             opt_.s_nodes_arm);
        buckets[b].nodes = buckets[b].ct.all_nodes();
        buckets[b].pairs.resize(buckets[b].nodes.size());
    }
    // Build all pairs in parallel.
    std::vector<std::pair<int, int>> jobs;
    for (int b = 0; b < nb; ++b)
        for (size_t j = 0; j < buckets[b].nodes.size(); ++j)
            jobs.emplace_back(b, static_cast<int>(j));
    parallel_for(static_cast<int>(jobs.size()), [&](int idx) {
        auto [b, j] = jobs[idx];
        Cplx lam = buckets[b].nodes[j].first;
        Cplx c = I * lam / alpha_;
        buckets[b].pairs[j] =
            std::make_shared<FastScalarPair>(airy_pair(p_, alpha_, c, reynolds_, cfg_));
    });

    // 15-point Kronrod panel rule for the x-integrals within a bucket ring.
    static const double KX[15] = {
        -0.991455371120813, -0.949107912342759, -0.864864423359769,
        -0.741531185599394, -0.586087235467691, -0.405845151377397,
        -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
        0.586087235467691, 0.741531185599394, 0.864864423359769,
        0.949107912342759, 0.991455371120813};
    static const double KW[15] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728, 0.204432940075298,
        0.190350578064785, 0.169004726639267, 0.140653259715525,
        0.104790010322250, 0.063092092629979, 0.022935322010529};

    std::vector<Cplx> out(n, 0.0);
    parallel_for(n, [&](int iz) {
        double z = grid[iz];
        Cplx acc = 0.0;
        for (int b = 0; b < nb; ++b) {
            double d0 = edges[b], d1 = edges[b + 1];
            double seg[2][2] = {{z + d0, std::min(z + d1, p_.z_max)},
                                {std::max(z - d1, 0.0), z - d0}};
            for (auto& sg : seg) {
                if (sg[1] <= sg[0]) continue;
                for (size_t j = 0; j < buckets[b].nodes.size(); ++j) {
                    const auto& [lam, wgt] = buckets[b].nodes[j];
                    double et = lam.real() * t;
                    if (et < -40.0) continue;
                    const FastScalarPair& pr = *buckets[b].pairs[j];
                    Cplx xint = 0.0;
                    double mid = 0.5 * (sg[0] + sg[1]), hh = 0.5 * (sg[1] - sg[0]);
                    for (int q = 0; q < 15; ++q) {
                        double x = mid + hh * KX[q];
                        xint += hh * KW[q] * airy_kernel(pr, x, z) * omega.f(x);
                    }
                    acc += wgt * std::exp(lam * t) * xint;
                }
            }
        }
        out[iz] = acc * Cplx(-1.0 / (2.0 * M_PI * alpha_), 0.0);
    });
    return out;
}

std::vector<Cplx> SemigroupEvaluator::r_part(double t, const ScalarField& omega) const {
    const auto& grid = *grid_;
    const int n = static_cast<int>(grid.size());
    std::vector<Cplx> out(n, 0.0);
    if (!opt_.with_r_part) return out;

    const double gamma = lambda0_ + opt_.tau + opt_.gamma_shift;
    std::vector<std::vector<Cplx>> contrib(rnodes_.size());
    parallel_for(static_cast<int>(rnodes_.size()), [&](int i) {
        const RNode& rn = rnodes_[i];
        if ((rn.lambda.real() - gamma) * t < -40.0) {
            contrib[i].assign(n, 0.0);
            return;
        }
        // p(y) = int G(x,y) omega(x) dx, then q(z) = int G_a(y,z) U'' p dy.
        std::vector<Cplx> p = green_convolve(*rn.kernel, grid, omega.f);
        CubicSpline<Cplx> pspl(grid, p);
        std::vector<Cplx> q(n);
        const double width = 45.0 / std::max(rn.pair->rates.m_f, 1e-6);
        for (int iz = 0; iz < n; ++iz) {
            double z = grid[iz];
            double lo = std::max(0.0, z - width), hi = std::min(p_.z_max, z + width);
            auto f = [&](double y) {
                return airy_kernel(*rn.pair, y, z) * p_.ddu(y) * pspl.eval(y);
            };
            q[iz] = integrate_gk_split(f, lo, hi, {z}, 1e-11, 1e-8);
        }
        Cplx pref = rn.weight * std::exp(rn.lambda * t) * Cplx(-1.0 / (2.0 * M_PI * alpha_), 0.0);
        contrib[i].resize(n);
        for (int iz = 0; iz < n; ++iz) contrib[i][iz] = pref * q[iz];
    });
    for (const auto& cv : contrib)
        for (int iz = 0; iz < n; ++iz) out[iz] += cv[iz];
    return out;
}

EvolutionResult SemigroupEvaluator::evolve(double t, const ScalarField& omega,
                                           double eta) const {
    if (eta > 0.125 + 1e-12)
        throw WeightError("apply_semigroup: eta must lie in [0, 1/8]");
    EvolutionResult res;
    res.t = t;
    res.grid = grid_;
    const auto& grid = *grid_;
    if (t <= 0.0) {
        res.omega.resize(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) res.omega[i] = omega.f(grid[i]);
        res.s_part = res.omega;
        res.r_part.assign(grid.size(), 0.0);
        res.norm_eta = weighted_sup(grid, res.omega, eta);
        res.norm_eta_s = res.norm_eta;
        return res;
    }
    res.s_part = s_part(t, omega);
    res.r_part = r_part(t, omega);
    res.omega.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        res.omega[i] = res.s_part[i] + res.r_part[i];
    res.norm_eta = weighted_sup(grid, res.omega, eta);
    res.norm_eta_s = weighted_sup(grid, res.s_part, eta);
    res.norm_eta_r = weighted_sup(grid, res.r_part, eta);
    return res;
}

EvolutionResult apply_semigroup(const Profile& p, double alpha, double reynolds,
                                double t, const ScalarField& omega, double eta,
                                const SemigroupOptions& opt, const Config& cfg) {
    SemigroupEvaluator ev(p, alpha, reynolds, opt, cfg);
    ev.prepare(t);
    return ev.evolve(t, omega, eta);
}

std::pair<EvolutionResult, EvolutionResult> split_semigroup(
    const Profile& p, double alpha, double reynolds, double t, const ScalarField& omega,
    double eta, const SemigroupOptions& opt, const Config& cfg) {
    EvolutionResult full = apply_semigroup(p, alpha, reynolds, t, omega, eta, opt, cfg);
    EvolutionResult s = full, r = full;
    s.omega = full.s_part;
    s.norm_eta = full.norm_eta_s;
    r.omega = full.r_part;
    r.norm_eta = full.norm_eta_r;
    return {s, r};
}

GrowthFit growth_rate(const Profile& p, double alpha, double reynolds,
                      const ScalarField& omega, const std::vector<double>& t_grid,
                      double eta, const SemigroupOptions& opt, const Config& cfg) {
    if (t_grid.size() < 2) throw ParameterError("growth_rate: need >= 2 times");
    SemigroupEvaluator ev(p, alpha, reynolds, opt, cfg);
    double tmin = *std::min_element(t_grid.begin(), t_grid.end());
    ev.prepare(std::max(tmin, 1e-4));
    GrowthFit fit;
    std::vector<double> logs;
    for (double t : t_grid) {
        EvolutionResult r = ev.evolve(t, omega, eta);
        fit.norms.push_back(r.norm_eta);
        logs.push_back(std::log(std::max(r.norm_eta, 1e-300)));
    }
    double n = static_cast<double>(t_grid.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        st += t_grid[i];
        sl += logs[i];
        stt += t_grid[i] * t_grid[i];
        stl += t_grid[i] * logs[i];
    }
    fit.rate = (n * stl - st * sl) / (n * stt - st * st);
    fit.amplitude = std::exp((sl - fit.rate * st) / n);
    return fit;
}

}  // namespace oswald
