#include "oswald/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace oswald {

namespace {

// QUADPACK (G7,K15) pair on [-1,1]; positive Kronrod abscissae, symmetric.
const double kXK[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// G7 weights matching Kronrod abscissae with odd index (1,3,5,7).
const double kWG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    Cplx value;
    double err;
};

Panel eval_panel(const std::function<Cplx(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    Cplx k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 8; ++i) {
        Cplx fv;
        if (i == 7) {
            fv = f(m);
            k15 += kWK[7] * fv;
            g7 += kWG[3] * fv;
        } else {
            Cplx f1 = f(m - h * kXK[i]);
            Cplx f2 = f(m + h * kXK[i]);
            k15 += kWK[i] * (f1 + f2);
            if (i % 2 == 1) g7 += kWG[i / 2] * (f1 + f2);
        }
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = h * k15;
    p.err = std::abs(h * (k15 - g7));
    return p;
}

}  // namespace

Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double abs_tol, double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    std::vector<Panel> done;
    struct Work {
        Panel p;
        int depth;
    };
    std::vector<Work> stack;
    stack.push_back({eval_panel(f, a, b), 0});
    Cplx total = stack.back().p.value;
    while (!stack.empty()) {
        Work w = stack.back();
        stack.pop_back();
        double tol = std::max(abs_tol, rel_tol * std::abs(total)) *
                     std::abs(w.p.b - w.p.a) / std::abs(b - a);
        if (w.p.err <= std::max(tol, 1e-300) || w.depth >= max_depth) {
            done.push_back(w.p);
            continue;
        }
        double m = 0.5 * (w.p.a + w.p.b);
        Panel p1 = eval_panel(f, w.p.a, m);
        Panel p2 = eval_panel(f, m, w.p.b);
        total += p1.value + p2.value - w.p.value;
        stack.push_back({p1, w.depth + 1});
        stack.push_back({p2, w.depth + 1});
    }
    Cplx sum = 0.0;
    for (const auto& p : done) sum += p.value;
    return sum;
}

Cplx integrate_gk_split(const std::function<Cplx(double)>& f, double a, double b,
                        std::vector<double> kinks, double abs_tol, double rel_tol) {
    kinks.push_back(a);
    kinks.push_back(b);
    std::sort(kinks.begin(), kinks.end());
    Cplx sum = 0.0;
    for (size_t i = 0; i + 1 < kinks.size(); ++i) {
        double lo = std::clamp(kinks[i], a, b);
        double hi = std::clamp(kinks[i + 1], a, b);
        if (hi - lo > 1e-300) sum += integrate_gk(f, lo, hi, abs_tol, rel_tol);
    }
    return sum;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess + Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

void gauss_legendre_ab(int n, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights) {
    gauss_legendre(n, nodes, weights);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * nodes[i];
        weights[i] *= 0.5 * (b - a);
    }
}

}  // namespace oswald
