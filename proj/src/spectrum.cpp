#include "oswald/spectrum.hpp"

#include <cmath>
#include <map>

#include "oswald/parallel.hpp"
#include "oswald/quadrature.hpp"
#include "oswald/rayleigh.hpp"

namespace oswald {

SpectralStrip spectral_strip(const Profile& p, double alpha, double nu) {
    SpectralStrip s;
    s.alpha = alpha;
    s.nu = nu;
    auto integrand = [&](double z) -> Cplx {
        double w = z * p.du(z);
        return w * w;
    };
    s.C0 = std::sqrt(integrate_gk(integrand, 0.0, p.z_max, 1e-12, 1e-12).real());
    double umax = 0.0;
    for (int i = 0; i <= 2048; ++i)
        umax = std::max(umax, std::abs(p.u(p.z_max * i / 2048.0)));
    s.C1 = umax + s.C0;
    double aa = std::abs(alpha);
    s.re_max = -alpha * alpha * nu + s.C0 * aa;
    s.im_max = s.C1 * aa;
    return s;
}

Cplx evans_at(const Profile& p, double alpha, Cplx c, double reynolds,
              const Config& cfg) {
    try {
        return viscous_evans(build_os_modes(p, alpha, c, reynolds, cfg));
    } catch (const SubcriticalityError&) {
        // Conservative gate tripped (small |E| near an inviscid root); retry
        // relying on the measured contraction ratio instead.
        Config relaxed = cfg;
        relaxed.iter_gate = 50.0;
        return viscous_evans(build_os_modes(p, alpha, c, reynolds, relaxed));
    }
}

namespace {

// For boundary sampling: a graze within ~1e-5 of an inviscid Rayleigh root
// makes the slow-mode gate degenerate; nudge the sample (same homotopy class
// as long as no Evans root sits that close to the path).
Cplx evans_at_robust(const Profile& p, double alpha, Cplx c, double reynolds,
                     const Config& cfg) {
    try {
        return evans_at(p, alpha, c, reynolds, cfg);
    } catch (const SubcriticalityError&) {
        Cplx nudge = Cplx(3e-5, 3e-5) * (1.0 + std::abs(c));
        return evans_at(p, alpha, c + nudge, reynolds, cfg);
    }
}

}  // namespace

namespace {

// Boundary parametrization t in [0,4): edges of the box counterclockwise.
Cplx box_point(const ComplexBox& b, double t) {
    t = std::fmod(t, 4.0);
    if (t < 1.0) return {b.re0 + t * (b.re1 - b.re0), b.im0};
    if (t < 2.0) return {b.re1, b.im0 + (t - 1.0) * (b.im1 - b.im0)};
    if (t < 3.0) return {b.re1 - (t - 2.0) * (b.re1 - b.re0), b.im1};
    return {b.re0, b.im1 - (t - 3.0) * (b.im1 - b.im0)};
}

struct WindingEval {
    const Profile* p;
    double alpha, reynolds;
    const ComplexBox* box;
    const Config* cfg;
    std::map<double, Cplx> cache;

    Cplx at(double t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        Cplx d = evans_at_robust(*p, alpha, box_point(*box, t), reynolds, *cfg);
        cache[t] = d;
        return d;
    }
};

}  // namespace

int evans_winding(const Profile& p, double alpha, double reynolds, const ComplexBox& box,
                  int samples, const Config& cfg) {
    WindingEval ev{&p, alpha, reynolds, &box, &cfg, {}};
    std::vector<double> ts(samples);
    for (int i = 0; i < samples; ++i) ts[i] = 4.0 * i / samples;
    {
        std::vector<Cplx> vals(samples);
        parallel_for(samples, [&](int i) {
            vals[i] = evans_at_robust(p, alpha, box_point(box, ts[i]), reynolds, cfg);
        });
        for (int i = 0; i < samples; ++i) ev.cache[ts[i]] = vals[i];
    }
    // Phase unwrap with adaptive bisection where increments are ambiguous.
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        double t0 = ts[i], t1 = (i + 1 < samples) ? ts[i + 1] : 4.0;
        // accumulate arg increments over [t0, t1], splitting until < pi/2
        struct Seg {
            double a, b;
        };
        std::vector<Seg> stack{{t0, t1}};
        int guard = 0;
        while (!stack.empty()) {
            Seg s = stack.back();
            stack.pop_back();
            Cplx da = ev.at(s.a), db = ev.at(s.b == 4.0 ? 0.0 : s.b);
            double dphi = std::arg(db / da);
            if (std::abs(dphi) < M_PI / 2 || ++guard > 4096 || (s.b - s.a) < 1e-7) {
                total += dphi;
            } else {
                double m = 0.5 * (s.a + s.b);
                stack.push_back({m, s.b});
                stack.push_back({s.a, m});
            }
        }
    }
    double w = total / (2.0 * M_PI);
    int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.25)
        throw NumericalGateError("evans_winding: non-integer winding estimate " +
                                 std::to_string(w));
    return wi;
}

namespace {

// Secant iteration on D from two seeds; returns root and |D| there.
std::pair<Cplx, double> secant_root(const Profile& p, double alpha, double reynolds,
                                    Cplx c0, Cplx c1, const Config& cfg,
                                    int max_iter = 60, double ctol = 1e-12) {
    Cplx d0 = evans_at(p, alpha, c0, reynolds, cfg);
    Cplx d1 = evans_at(p, alpha, c1, reynolds, cfg);
    for (int it = 0; it < max_iter; ++it) {
        Cplx denom = d1 - d0;
        if (std::abs(denom) < 1e-300) break;
        Cplx c2 = c1 - d1 * (c1 - c0) / denom;
        Cplx d2 = evans_at(p, alpha, c2, reynolds, cfg);
        c0 = c1;
        d0 = d1;
        c1 = c2;
        d1 = d2;
        if (std::abs(c1 - c0) < ctol * (1.0 + std::abs(c1))) break;
    }
    return {c1, std::abs(d1)};
}

EigenRecord make_record(const Profile& p, double alpha, double reynolds, Cplx c,
                        double resid, const Config& cfg) {
    EigenRecord rec;
    rec.alpha = alpha;
    rec.c = c;
    rec.lambda = -I * alpha * c;
    rec.residual = resid;

    Config relaxed = cfg;
    relaxed.iter_gate = 50.0;
    OSModeBasis m = build_os_modes(p, alpha, c, reynolds, relaxed);
    // phi = phi_s - a phi_f with sup-normalized decaying modes.
    Cplx s0 = m.s_minus.factor_stack(0.0)[0] / m.s_minus.sup_abs;
    Cplx f0 = m.f_minus.factor_stack(0.0)[0] / m.f_minus.sup_abs;
    Cplx a = s0 / f0;
    const auto& grid = *m.grid;
    SampledFunction phi;
    phi.grid = m.grid;
    phi.f0.resize(grid.size());
    phi.f1.resize(grid.size());
    phi.f2.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double z = grid[i];
        Cplx es = std::exp(m.s_minus.log_prefactor(z));
        Cplx ef = std::exp(m.f_minus.log_prefactor(z));
        CVec4 ss = m.s_minus.factor_stack(z), ff = m.f_minus.factor_stack(z);
        phi.f0[i] = es * ss[0] / m.s_minus.sup_abs - a * ef * ff[0] / m.f_minus.sup_abs;
        phi.f1[i] = es * ss[1] / m.s_minus.sup_abs - a * ef * ff[1] / m.f_minus.sup_abs;
        phi.f2[i] = es * ss[2] / m.s_minus.sup_abs - a * ef * ff[2] / m.f_minus.sup_abs;
    }
    double sup = 0.0, sup1 = 0.0;
    for (auto& v : phi.f0) sup = std::max(sup, std::abs(v));
    for (auto& v : phi.f1) sup1 = std::max(sup1, std::abs(v));
    for (auto& v : phi.f0) v /= sup;
    for (auto& v : phi.f1) v /= sup;
    for (auto& v : phi.f2) v /= sup;
    rec.bc_value = std::abs(phi.f0.front());
    rec.bc_slope = std::abs(phi.f1.front()) / (sup1 / sup);
    rec.mode = std::move(phi);
    return rec;
}

void find_rec(const Profile& p, double alpha, double reynolds, const ComplexBox& box,
              const Config& cfg, FindResult& out, int depth) {
    int w = evans_winding(p, alpha, reynolds, box, 512, cfg);
    if (depth == 0) out.total_winding = w;
    if (w == 0) return;
    if (w == 1 || box.diam() < 1e-6 || depth >= 10) {
        Cplx c0 = box.center();
        Cplx c1 = c0 + Cplx(0.1 * (box.re1 - box.re0), 0.07 * (box.im1 - box.im0));
        auto [root, resid] = secant_root(p, alpha, reynolds, c0, c1, cfg);
        bool inside = root.real() >= box.re0 - 1e-9 && root.real() <= box.re1 + 1e-9 &&
                      root.imag() >= box.im0 - 1e-9 && root.imag() <= box.im1 + 1e-9;
        if (!inside) {
            out.warnings.push_back("root refinement escaped its box");
            return;
        }
        // Multiplicity-1 certificate on a small enclosing box.
        double r = std::max(2e-4, 1e-3 * box.diam());
        ComplexBox cert{root.real() - r, root.real() + r, root.imag() - r,
                        root.imag() + r};
        int wc = 0;
        try {
            wc = evans_winding(p, alpha, reynolds, cert, 128, cfg);
        } catch (const NumericalGateError&) {
            wc = -1;
        }
        EigenRecord rec = make_record(p, alpha, reynolds, root, resid, cfg);
        rec.winding = wc;
        if (wc != 1) out.warnings.push_back("certificate winding != 1 for a root");
        // Deduplicate against previously found roots.
        for (const auto& r0 : out.records)
            if (std::abs(r0.c - root) < 1e-7) return;
        out.records.push_back(std::move(rec));
        return;
    }
    double rm = 0.5 * (box.re0 + box.re1), im = 0.5 * (box.im0 + box.im1);
    ComplexBox quads[4] = {{box.re0, rm, box.im0, im},
                           {rm, box.re1, box.im0, im},
                           {box.re0, rm, im, box.im1},
                           {rm, box.re1, im, box.im1}};
    for (const auto& q : quads) find_rec(p, alpha, reynolds, q, cfg, out, depth + 1);
}

}  // namespace

FindResult find_eigenvalues(const Profile& p, double alpha, double reynolds,
                            const ComplexBox& box, const Config& cfg) {
    // The box must respect the admissibility margin around Range(U).
    auto [lo, hi] = p.range();
    bool overlaps = box.re1 >= lo && box.re0 <= hi;
    double margin = cfg.eps0 / (1.0 + alpha);
    if (overlaps && box.im0 < margin && box.im1 > -margin)
        throw ParameterError("find_eigenvalues: box violates the admissibility margin");

    FindResult out;
    find_rec(p, alpha, reynolds, box, cfg, out, 0);
    if (static_cast<int>(out.records.size()) != out.total_winding)
        out.warnings.push_back("total winding " + std::to_string(out.total_winding) +
                               " != roots found " + std::to_string(out.records.size()));
    return out;
}

Cplx inviscid_root(const Profile& p, double alpha, Cplx seed, const Config& cfg) {
    Cplx c0 = seed, c1 = seed + Cplx(1e-3, 1e-3);
    Cplx e0 = inviscid_evans(p, alpha, c0, cfg);
    Cplx e1 = inviscid_evans(p, alpha, c1, cfg);
    for (int it = 0; it < 80; ++it) {
        Cplx denom = e1 - e0;
        if (std::abs(denom) < 1e-300) break;
        Cplx c2 = c1 - e1 * (c1 - c0) / denom;
        Cplx e2 = inviscid_evans(p, alpha, c2, cfg);
        c0 = c1;
        e0 = e1;
        c1 = c2;
        e1 = e2;
        if (std::abs(c1 - c0) < 1e-13 * (1.0 + std::abs(c1))) break;
    }
    return c1;
}

std::vector<std::pair<double, Cplx>> continue_from_inviscid(
    const Profile& p, double alpha0, Cplx c0, const std::vector<double>& nu_schedule,
    const Config& cfg) {
    Cplx e0 = inviscid_evans(p, alpha0, c0, cfg);
    if (std::abs(e0) > 1e-8)
        throw ParameterError("continue_from_inviscid: E(alpha0, c0) != 0 (|E| = " +
                             std::to_string(std::abs(e0)) + ")");
    double h = 1e-4;
    Cplx dE = (inviscid_evans(p, alpha0, c0 + h, cfg) -
               inviscid_evans(p, alpha0, c0 - h, cfg)) /
              (2.0 * h);
    if (std::abs(dE) < 1e-3)
        throw ParameterError("continue_from_inviscid: d_c E too small at the seed");

    std::vector<std::pair<double, Cplx>> path;
    Cplx seed = c0;
    double last_good = 0.0;
    bool first = true;
    for (double nu : nu_schedule) {
        double R = 1.0 / nu;
        // Offset the first seeds away from the inviscid root: the slow-mode
        // gate degenerates exactly at E(alpha0, c) = 0.
        double off = first ? std::max(1e-4, 0.05 * std::sqrt(nu)) : 0.0;
        first = false;
        Cplx s0 = seed + Cplx(0.3 * off, off);
        Cplx c1 = s0 + Cplx(0.0, 0.02 * std::sqrt(nu) + 1e-4);
        try {
            auto [root, resid] = secant_root(p, alpha0, R, s0, c1, cfg);
            if (resid > 1e-6)  // D is O(1)-normalized
                throw ContinuationError("continue_from_inviscid: secant stalled", last_good);
            if (root.imag() <= 0.0)
                throw ContinuationError("continue_from_inviscid: Im c_nu <= 0", last_good);
            path.emplace_back(nu, root);
            seed = root;
            last_good = nu;
        } catch (const NumericalGateError&) {
            throw ContinuationError("continue_from_inviscid: Newton divergence", last_good);
        }
    }
    return path;
}

MaxRateResult max_unstable_rate(const Profile& p, double alpha, double reynolds,
                                const Config& cfg) {
    MaxRateResult res;
    res.lambda = 0.0;
    double aa = std::abs(alpha);
    bool conj = alpha < 0.0;

    auto [lo, hi] = p.range();
    double bottom = std::max(0.01, 1.5 * cfg.eps0 / (1.0 + aa));
    // Large-alpha certificate rules out the search entirely.
    if (large_alpha_nonvanishing(p, aa, Cplx(0.5 * (lo + hi), bottom))) return res;

    SpectralStrip strip = spectral_strip(p, aa, 1.0 / reynolds);
    double top = std::max(bottom * 2.0,
                          std::min(strip.C0 - aa / reynolds, 0.5 * (hi - lo) + 0.2));
    ComplexBox box{lo - 0.2, hi + 0.2, bottom, top};
    FindResult fr = find_eigenvalues(p, aa, reynolds, box, cfg);
    res.warnings = fr.warnings;
    double best = 0.0;
    for (auto& rec : fr.records) {
        double growth = rec.lambda.real();
        if (growth > best) {
            best = growth;
            res.lambda = rec.lambda;
            res.record = rec;
        }
    }
    if (conj && res.lambda != Cplx(0.0)) {
        res.lambda = std::conj(res.lambda);
        if (res.record) {
            res.record->c = std::conj(res.record->c);
            res.record->lambda = std::conj(res.record->lambda);
        }
    }
    return res;
}

}  // namespace oswald
