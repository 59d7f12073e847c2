#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "oswald/interp.hpp"
#include "oswald/types.hpp"

namespace oswald {

/// Weighted sup norm ||f||_eta = sup_z |f(z)| e^(eta z), or for order 2 the
/// derivative-weighted sum  sum_{k<=2} alpha^-k ||d^k f||_eta.
struct WeightedNorm {
    double eta = 0.5;
    int order = 0;  // 0 or 2
    double alpha = 1.0;

    double value(const std::vector<double>& grid,
                 const std::vector<Cplx>& f) const;
    double value2(const std::vector<double>& grid, const std::vector<Cplx>& f,
                  const std::vector<Cplx>& df, const std::vector<Cplx>& d2f) const;
};

/// Solution of a stiff linear system W' = A(z) W carried in renormalized form
/// W(z) = exp(expo(z)) Z(z): nodes, bounded factors Z, their derivatives, and
/// the exponent expo(z) = integral of mu from the interval's left end.
struct RenormTrajectory {
    std::vector<double> nodes;          // ascending
    std::vector<CVec> values;           // bounded factor per node
    std::vector<CVec> derivs;           // dZ/dz per node
    std::vector<Cplx> expo;             // cumulative integral of mu
    std::vector<Cplx> expo_deriv;       // mu at node
    int dim = 0;

    CVec eval(double z) const;
    CVec eval_deriv(double z) const;
    Cplx expo_at(double z) const;
    Cplx mu_at(double z) const;
    double sup_factor() const;

    /// Shift the exponent so expo_at(z_ref) == 0 and fold the removed phase
    /// into nothing (callers rescale factors separately).
    void anchor_exponent(double z_ref);
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double underflow_rel = 1e-13;
    /// Dense-output cap: the stored cubic Hermite is fourth order, so steps
    /// are capped below the accuracy-driven RK step.
    double h_dense = 0.05;
    /// Stability cap on the step size as a function of z (explicit pair on a
    /// stiff renormalized system still needs |h lambda| bounded).
    std::function<double(double)> max_step;
};

enum class Direction { forward, backward };

/// Integrate W' = A(z) W written as W = e^(int mu) Z with Z' = (A - mu I) Z,
/// by an adaptive embedded Dormand-Prince 5(4) pair with cubic Hermite dense
/// output. `backward` runs from interval.second down to interval.first and is
/// the right direction for decaying modes. Throws StiffnessError on step-size
/// underflow.
RenormTrajectory integrate_renormalized(
    const std::function<CMat(double)>& A, const std::function<Cplx(double)>& mu_guide,
    Direction direction, const CVec& init, std::pair<double, double> interval,
    const IntegrateOptions& opts = {});

/// Allocation-free variant for hot paths: A_inplace fills a caller-owned
/// matrix.
RenormTrajectory integrate_renormalized_inplace(
    const std::function<void(double, CMat&)>& A_inplace,
    const std::function<Cplx(double)>& mu_guide, Direction direction, const CVec& init,
    std::pair<double, double> interval, const IntegrateOptions& opts = {});

struct PicardReport {
    std::vector<double> correction_norms;
    std::vector<double> ratios;
    int iterations = 0;
    double final_factor = 0.0;
};

struct IterationBudgetError : NumericalGateError {
    using NumericalGateError::NumericalGateError;
    std::string kind() const override { return "iteration-budget"; }
};

/// Grid samples of a vector-valued function on the Duhamel tail.
struct TailFunction {
    std::vector<double> grid;
    std::vector<CVec> values;
};

/// Fixed point of V(z) = forcing(z) + int_{anchor}^{z} K(z-y) pert(y) V(y) dy
/// on the tail [tail_start, z_end], solved by Picard iteration in the given
/// weighted norm until successive iterates differ by < tol. The kernel must be
/// a translation kernel K(s) (matrix exponential type), which enables an O(N)
/// recurrence per sweep. anchor_at_end = true anchors the integral at z_end
/// (decaying modes, integral from z to z_end); false anchors at tail_start.
TailFunction duhamel_fixed_point(
    const std::function<CMat(double)>& kernel_translation,
    const std::function<CMat(double)>& pert, const std::function<CVec(double)>& forcing,
    const WeightedNorm& norm, double tail_start, double z_end, bool anchor_at_end,
    PicardReport* report = nullptr, double tol = 1e-11, int max_iter = 200,
    double no_contraction_gate = 0.95, int grid_per_unit = 24);

/// One-shot estimate of the Picard contraction factor at tail start M:
/// applies the linear part of the map to a decaying probe and measures the
/// weighted-norm ratio.
double duhamel_contraction_estimate(
    const std::function<CMat(double)>& kernel_translation,
    const std::function<CMat(double)>& pert, const WeightedNorm& norm,
    double tail_start, double z_end, bool anchor_at_end, int grid_per_unit = 24);

}  // namespace oswald
