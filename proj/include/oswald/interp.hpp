#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include "oswald/types.hpp"

namespace oswald {

/// Locate the segment index i with x[i] <= t <= x[i+1] (clamped).
inline int locate_segment(const std::vector<double>& x, double t) {
    if (t <= x.front()) return 0;
    if (t >= x.back()) return static_cast<int>(x.size()) - 2;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    return static_cast<int>(it - x.begin()) - 1;
}

/// Cubic Hermite evaluation on one segment from endpoint values and slopes.
template <class T>
T hermite_eval(double t, double x0, double x1, const T& f0, const T& f1,
               const T& d0, const T& d1) {
    double h = x1 - x0;
    double s = (t - x0) / h;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1;
    double h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2;
    double h11 = s3 - s2;
    return h00 * f0 + (h * h10) * d0 + h01 * f1 + (h * h11) * d1;
}

template <class T>
T hermite_eval_deriv(double t, double x0, double x1, const T& f0, const T& f1,
                     const T& d0, const T& d1) {
    double h = x1 - x0;
    double s = (t - x0) / h;
    double s2 = s * s;
    double g00 = (6 * s2 - 6 * s) / h;
    double g10 = 3 * s2 - 4 * s + 1;
    double g01 = (-6 * s2 + 6 * s) / h;
    double g11 = 3 * s2 - 2 * s;
    return g00 * f0 + g10 * d0 + g01 * f1 + g11 * d1;
}

/// Natural cubic spline through (x_i, y_i), value types double or Cplx.
template <class T>
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<T> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const int n = static_cast<int>(x_.size());
        assert(n >= 2 && y_.size() == x_.size());
        m_.assign(n, T{});
        if (n == 2) return;
        // Tridiagonal solve for second derivatives, natural ends.
        std::vector<double> diag(n, 0.0), sub(n, 0.0), sup(n, 0.0);
        std::vector<T> rhs(n, T{});
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for (int i = 1; i < n - 1; ++i) {
            double h0 = x_[i] - x_[i - 1];
            double h1 = x_[i + 1] - x_[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        }
        for (int i = 1; i < n; ++i) {
            double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (int i = n - 2; i >= 0; --i)
            m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }

    T eval(double t) const {
        int i = locate_segment(x_, t);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
    }

    T deriv(double t) const {
        int i = locate_segment(x_, t);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3 * b * b - 1) * m_[i + 1] - (3 * a * a - 1) * m_[i]) * h / 6.0;
    }

    T deriv2(double t) const {
        int i = locate_segment(x_, t);
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
        return a * m_[i] + b * m_[i + 1];
    }

    /// Piecewise-constant third derivative of the cubic.
    T deriv3(double t) const {
        int i = locate_segment(x_, t);
        double h = x_[i + 1] - x_[i];
        return (m_[i + 1] - m_[i]) / h;
    }

    const std::vector<double>& knots() const { return x_; }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_;
    std::vector<T> y_;
    std::vector<T> m_;
};

}  // namespace oswald
