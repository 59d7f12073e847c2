#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace oswald {

using Real = double;
using Cplx = std::complex<double>;

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using CVec2 = Eigen::Vector2cd;
using CVec3 = Eigen::Vector3cd;
using CVec4 = Eigen::Vector4cd;
using CMat2 = Eigen::Matrix2cd;
using CMat3 = Eigen::Matrix3cd;
using CMat4 = Eigen::Matrix4cd;

inline constexpr Cplx I{0.0, 1.0};

/// Parameter bundle (alpha, c, R) of one spectral point, with the derived
/// quantities used throughout: eps = 1/(i alpha R), nu = 1/R, lambda = -i alpha c.
struct SpectralPoint {
    double alpha = 1.0;
    Cplx c{2.0, 0.0};
    double reynolds = 1.0e4;

    Cplx eps() const { return 1.0 / (I * alpha * reynolds); }
    double nu() const { return 1.0 / reynolds; }
    Cplx lambda() const { return -I * alpha * c; }

    static SpectralPoint from_lambda(double alpha, Cplx lambda, double reynolds) {
        return SpectralPoint{alpha, I * lambda / alpha, reynolds};
    }
};

// ---------------------------------------------------------------------------
// Error hierarchy. ParameterError maps to CLI exit code 2; gate failures
// (subcriticality, at-eigenvalue, stiffness, ...) map to exit code 3.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual std::string kind() const { return "error"; }
    virtual std::string detail_json() const { return "{}"; }
};

struct ParameterError : Error {
    using Error::Error;
    std::string kind() const override { return "parameter"; }
};

struct NumericalGateError : Error {
    using Error::Error;
    std::string kind() const override { return "numerical-gate"; }
};

struct StiffnessError : NumericalGateError {
    double z_fail;
    StiffnessError(const std::string& what, double z)
        : NumericalGateError(what), z_fail(z) {}
    std::string kind() const override { return "stiffness"; }
    std::string detail_json() const override {
        return "{\"z\":" + std::to_string(z_fail) + "}";
    }
};

struct ContractionError : NumericalGateError {
    double factor;
    ContractionError(const std::string& what, double f)
        : NumericalGateError(what), factor(f) {}
    std::string kind() const override { return "contraction"; }
    std::string detail_json() const override {
        return "{\"factor\":" + std::to_string(factor) + "}";
    }
};

struct SubcriticalityError : NumericalGateError {
    double gate_value;
    SubcriticalityError(const std::string& what, double g)
        : NumericalGateError(what), gate_value(g) {}
    std::string kind() const override { return "subcriticality"; }
    std::string detail_json() const override {
        return "{\"gate\":" + std::to_string(gate_value) + "}";
    }
};

struct AtEigenvalueError : NumericalGateError {
    using NumericalGateError::NumericalGateError;
    std::string kind() const override { return "at-eigenvalue"; }
};

struct BranchError : NumericalGateError {
    using NumericalGateError::NumericalGateError;
    std::string kind() const override { return "branch"; }
};

struct WeightError : ParameterError {
    using ParameterError::ParameterError;
    std::string kind() const override { return "weight"; }
};

struct IllConditionedError : NumericalGateError {
    double z_at;
    IllConditionedError(const std::string& what, double z)
        : NumericalGateError(what), z_at(z) {}
    std::string kind() const override { return "ill-conditioned"; }
};

struct ContourConflictError : NumericalGateError {
    using NumericalGateError::NumericalGateError;
    std::string kind() const override { return "contour-conflict"; }
};

struct IncompleteSearchWarning : NumericalGateError {
    using NumericalGateError::NumericalGateError;
    std::string kind() const override { return "incomplete-search"; }
};

/// Global numeric policy knobs. Defaults follow the project conventions;
/// everything here can be overridden per call site or from the CLI config.
struct Config {
    double eps0 = 0.01;            // admissibility margin d_c >= eps0/(1+alpha)
    double iter_gate = 0.2;        // slow-mode gate on alpha m_f^-2 (1+1/|E|)
    double fast_gate = 0.5;        // fast-mode fixed-point factor gate
    double ode_rtol = 1e-10;
    double ode_atol = 1e-12;
    double quad_abstol = 1e-11;
    double theta0_contour = 0.25;  // semigroup case threshold
    double tau_margin = 0.1;       // spectral margin for the R-contour
    int max_picard = 200;
    int max_slow_iters = 60;
};

inline const Config& default_config() {
    static Config cfg;
    return cfg;
}

}  // namespace oswald
