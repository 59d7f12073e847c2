#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "oswald/green.hpp"
#include "oswald/spectrum.hpp"
#include "oswald/types.hpp"

namespace oswald {

enum class PieceKind { vertical, parabolic_up, parabolic_down, horizontal_shift };

struct ContourPiece {
    PieceKind kind;
    Cplx start, end;
    std::vector<Cplx> nodes;
    std::vector<Cplx> weights;  // Gauss-Legendre weight times dlambda/dk
};

/// Piecewise contour in the lambda plane with quadrature data. `a` is the
/// parabola parameter |x-z| / (2 nu t); five pieces in the small-a case,
/// three otherwise.
struct Contour {
    std::vector<ContourPiece> pieces;
    double alpha = 1, nu = 1e-3, t = 1;
    double a = 0, gamma = 0;
    bool small_a_case = false;  // a^2 nu <= theta0 (five pieces)

    double max_endpoint_gap() const;
    std::vector<std::pair<Cplx, Cplx>> all_nodes() const;  // (lambda, weight)
};

/// Exclusion half strip H_alpha(x, z): lambda = -k - alpha^2 nu - i alpha U(y),
/// k >= 0, y between x and z.
bool in_exclusion_strip(const Profile& p, double alpha, double nu, double x, double z,
                        Cplx lambda, double tol = 1e-12);

/// Spec-shaped contour for the pair (x, z): min/max of U over [x^z, xvz],
/// a = |x-z| / (2 nu t).
Contour build_contour(const Profile& p, double alpha, double nu, double t, double x,
                      double z, double theta0 = 0.25, int nodes_per_piece = 48);

/// Evaluation contour: U range taken over the whole half line (valid for every
/// pair, enabling bucket sharing), parabola parameter a given explicitly.
Contour build_contour_global(const Profile& p, double alpha, double nu, double t,
                             double a, double theta0 = 0.25, int nodes_per_piece = 48);

struct EvolutionResult {
    double t = 0;
    std::shared_ptr<const std::vector<double>> grid;
    std::vector<Cplx> omega;               // full semigroup
    std::vector<Cplx> s_part, r_part;      // split
    double norm_eta = 0;
    double norm_eta_s = 0, norm_eta_r = 0;
};

struct SemigroupOptions {
    double theta0 = 0.25;
    double tau = 0.1;
    double gamma_shift = 0.0;           // contour-independence checks
    int s_nodes_vertical = 96;
    int s_nodes_arm = 32;               // per arm segment (3 segments)
    int r_nodes_vertical = 96;
    int r_nodes_arm = 28;               // per ray segment
    int a_buckets = 16;
    std::optional<double> lambda0_real;  // Re lambda_alpha; resolved if absent
    bool with_r_part = true;
};

/// Reusable evaluator of e^(L_alpha t): caches the resolvent kernels along the
/// R-contour and the fast pairs along the S-contours, shared across t and
/// omega. All public methods are const after prepare().
class SemigroupEvaluator {
public:
    SemigroupEvaluator(Profile p, double alpha, double reynolds,
                       SemigroupOptions opt = {}, Config cfg = default_config());

    /// Build/refresh caches so t values >= t_min can be evaluated.
    void prepare(double t_min);

    EvolutionResult evolve(double t, const ScalarField& omega, double eta) const;

    double lambda0() const { return lambda0_; }
    const std::vector<double>& out_grid() const { return *grid_; }

private:
    struct RNode {
        Cplx lambda, weight;
        std::shared_ptr<GreenKernel> kernel;
        std::shared_ptr<FastScalarPair> pair;
    };

    std::vector<Cplx> s_part(double t, const ScalarField& omega) const;
    std::vector<Cplx> r_part(double t, const ScalarField& omega) const;

    Profile p_;
    double alpha_, reynolds_;
    SemigroupOptions opt_;
    Config cfg_;
    double lambda0_ = 0.0;
    double prepared_tmin_ = -1.0;
    std::shared_ptr<std::vector<double>> grid_;
    std::vector<RNode> rnodes_;
};

/// One-call wrappers.
EvolutionResult apply_semigroup(const Profile& p, double alpha, double reynolds,
                                double t, const ScalarField& omega, double eta,
                                const SemigroupOptions& opt = {},
                                const Config& cfg = default_config());

std::pair<EvolutionResult, EvolutionResult> split_semigroup(
    const Profile& p, double alpha, double reynolds, double t, const ScalarField& omega,
    double eta, const SemigroupOptions& opt = {}, const Config& cfg = default_config());

/// Least-squares slope of log ||omega(t)||_eta over the t grid.
struct GrowthFit {
    double rate = 0.0;
    double amplitude = 0.0;  // exp(intercept)
    std::vector<double> norms;
};
GrowthFit growth_rate(const Profile& p, double alpha, double reynolds,
                      const ScalarField& omega, const std::vector<double>& t_grid,
                      double eta, const SemigroupOptions& opt = {},
                      const Config& cfg = default_config());

}  // namespace oswald
