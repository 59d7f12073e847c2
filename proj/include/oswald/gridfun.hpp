#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "oswald/interp.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// User-supplied scalar function with optional analytic derivatives.
/// Missing derivatives fall back to centered differences (fine for the smooth
/// non-stiff inputs these are used for).
struct ScalarField {
    std::function<Cplx(double)> f;
    std::function<Cplx(double)> df;
    std::function<Cplx(double)> d2f;

    Cplx operator()(double z) const { return f(z); }
    Cplx d1(double z) const {
        if (df) return df(z);
        const double h = 1e-5 * (1.0 + std::abs(z));
        double zl = std::max(0.0, z - h);
        return (f(z + h) - f(zl)) / (z + h - zl);
    }
    Cplx d2(double z) const {
        if (d2f) return d2f(z);
        const double h = 5e-4 * (1.0 + std::abs(z));
        if (z - h < 0.0) return (f(z + 2 * h) - 2.0 * f(z + h) + f(z)) / (h * h);
        return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
    }
};

/// A function sampled with derivatives on a fixed grid. f0..f3 are the value
/// and up to three derivatives; trailing arrays may be empty. Evaluation uses
/// cubic Hermite with the next derivative as slope data where available.
struct SampledFunction {
    std::shared_ptr<const std::vector<double>> grid;
    std::vector<Cplx> f0, f1, f2, f3;

    const std::vector<double>& z() const { return *grid; }

    Cplx value(double t) const { return eval_pair(f0, f1, t); }
    Cplx d1(double t) const {
        if (!f2.empty()) return eval_pair(f1, f2, t);
        return eval_deriv_pair(f0, f1, t);
    }
    Cplx d2(double t) const {
        if (!f3.empty()) return eval_pair(f2, f3, t);
        if (!f2.empty()) return eval_deriv_pair(f1, f2, t);
        throw ParameterError("SampledFunction: second derivative unavailable");
    }
    Cplx d3(double t) const {
        if (!f3.empty()) return eval_deriv_pair(f2, f3, t);
        throw ParameterError("SampledFunction: third derivative unavailable");
    }

private:
    Cplx eval_pair(const std::vector<Cplx>& v, const std::vector<Cplx>& d, double t) const {
        const auto& g = *grid;
        int i = locate_segment(g, t);
        if (d.empty()) {
            // linear fallback
            double s = (t - g[i]) / (g[i + 1] - g[i]);
            return (1.0 - s) * v[i] + s * v[i + 1];
        }
        return hermite_eval<Cplx>(t, g[i], g[i + 1], v[i], v[i + 1], d[i], d[i + 1]);
    }
    Cplx eval_deriv_pair(const std::vector<Cplx>& v, const std::vector<Cplx>& d,
                         double t) const {
        const auto& g = *grid;
        int i = locate_segment(g, t);
        return hermite_eval_deriv<Cplx>(t, g[i], g[i + 1], v[i], v[i + 1], d[i], d[i + 1]);
    }
};

/// Graded grid on [0, z_max]: geometric growth from h0 near the wall (where
/// the fast modes live) up to h_max, then uniform. fast_scale is the largest
/// fast rate M_f the grid has to resolve.
std::shared_ptr<std::vector<double>> layer_grid(double z_max, double fast_scale,
                                                double h_max = 0.06, double ratio = 1.08);

/// sup over grid of |f| e^(eta z) for plain vectors.
double weighted_sup(const std::vector<double>& grid, const std::vector<Cplx>& f,
                    double eta);

}  // namespace oswald
